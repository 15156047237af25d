#ifndef AWR_MATERIALS_HPP
#define AWR_MATERIALS_HPP

#include <stdexcept>
#include <string>

namespace awr {

// Volumetric heat capacity alpha = rho * c_p [J/(K m^3)] and thermal
// conductivity lambda [W/(m K)].
struct MaterialParams {
    double alpha;
    double lambda;
    std::string name;
};

namespace materials {

inline MaterialParams air()   { return {1.293 * 1005.0, 0.0243, "air"}; }
inline MaterialParams water() { return {999.7 * 4192.1, 0.58, "water"}; }
inline MaterialParams steel() { return {7836.0 * 443.0, 48.9, "steel"}; }

inline MaterialParams by_name(const std::string& name) {
    if (name == "air") return air();
    if (name == "water") return water();
    if (name == "steel") return steel();
    throw std::invalid_argument("unknown material: " + name);
}

} // namespace materials

} // namespace awr

#endif
