#include "awr/wr.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace awr {

std::string to_string(WRMethod method) {
    switch (method) {
        case WRMethod::jacobi: return "jacobi";
        case WRMethod::gs_dn: return "gs-dn";
        case WRMethod::gs_nd: return "gs-nd";
        case WRMethod::async: return "async";
    }
    throw std::logic_error("to_string(WRMethod): invalid value");
}

WRMethod wr_method_from_string(const std::string& s) {
    if (s == "jacobi") return WRMethod::jacobi;
    if (s == "gs-dn") return WRMethod::gs_dn;
    if (s == "gs-nd") return WRMethod::gs_nd;
    if (s == "async") return WRMethod::async;
    throw std::invalid_argument("unknown WR method: " + s);
}

StepShape classify(const ShapePoint& p) {
    if (p.fresh_ug && p.fresh_q)
        throw std::logic_error("splitting point consumed fresh data on both sides; "
                               "not one of the three realizable shapes");
    if (p.fresh_ug) return StepShape::gs_nd;
    if (p.fresh_q) return StepShape::gs_dn;
    return StepShape::jacobi;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd gather(const Eigen::VectorXd& u, const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = u[idx[i]];
    return out;
}

// The exchanged rows of a side iterate as a waveform of their own.
Waveform gamma_waveform(const Waveform& side, const std::vector<int>& gamma_local) {
    Waveform out(side.times(), static_cast<int>(gamma_local.size()));
    for (int n = 0; n < side.points(); ++n) out.update_point(n, gather(side.at(n), gamma_local));
    return out;
}

void check_config(const MonolithicSystem& sys, const WRConfig& config) {
    if (config.tol <= 0.0) throw std::invalid_argument("WRConfig: tol must be positive");
    if (config.kmax < 1) throw std::invalid_argument("WRConfig: kmax must be at least 1");
    for (const TimeGrid* g : {&config.grid_v, &config.grid_w}) {
        if (g->N < 1 || g->Tf <= 0.0)
            throw std::invalid_argument("WRConfig: both time grids must be set");
        if (std::abs(g->Tf - sys.Tf) > 1e-12 * std::max(1.0, std::abs(sys.Tf)))
            throw std::invalid_argument("WRConfig: grid horizon differs from the system horizon");
        if (g->N < config.lmm.m)
            throw std::invalid_argument("WRConfig: grid has fewer steps than the method needs");
    }
}

Waveform initial_iterate(const MonolithicSystem& sys, const std::vector<int>& rows,
                         const TimeGrid& grid, const Waveform* guess) {
    const Eigen::VectorXd init = gather(sys.u0, rows);
    if (!guess) return Waveform(grid, init);
    if (guess->points() != grid.N + 1 || guess->dim() != static_cast<int>(rows.size()))
        throw std::invalid_argument("initial guess does not match the side grid");
    const double scale = std::max(1.0, init.cwiseAbs().maxCoeff());
    if ((guess->at(0) - init).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("initial guess must start from the initial value");
    return *guess;
}

std::pair<double, double> resolve_thetas(const RelaxChoice& relax, SplitKind kind) {
    if (const auto* ct = std::get_if<ConstantTheta>(&relax)) return {ct->theta_v, ct->theta_w};
    return thetas_for(kind, std::get<RelaxTable>(relax));
}

void check_thetas(double theta_v, double theta_w) {
    if (!(theta_v > 0.0) || !(theta_w > 0.0))
        throw std::invalid_argument("relaxation weights must be positive");
}

// Largest-over-time discrete interface L2 distance to the reference, sampled
// at the reference quantity's own grid points.
double interface_error_of(const Waveform& ug, double weight, const Waveform* ref) {
    if (!ref) return std::numeric_limits<double>::quiet_NaN();
    double err = 0.0;
    for (int n = 0; n < ug.points(); ++n)
        err = std::max(err, weight * (ug.at(n) - ref->eval(ug.time(n))).norm());
    return err;
}

// One subproblem sweep against a fixed peer interpolant: step with the
// unrelaxed history, store relaxed exchanged rows.  prev supplies the
// starting values and the relaxation partners.
Waveform sweep_side(const Subproblem& sub, int m, const std::vector<int>& gamma_local,
                    double theta, const Waveform& prev, const Waveform& peer_gamma) {
    const TimeGrid& grid = sub.grid();
    Waveform cur(grid, sub.dim());
    std::vector<Eigen::VectorXd> hist;
    hist.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        cur.update_point(j, prev.at(j));
        hist.push_back(prev.at(j));
    }
    auto peer = [&](double t) { return peer_gamma.eval(t); };
    for (int n = 0; n + m <= grid.N; ++n) {
        Eigen::VectorXd hat = sub.step(n, hist, peer);
        Eigen::VectorXd stored = hat;
        for (int g : gamma_local) stored[g] = relax_combine(theta, hat[g], prev.at(n + m)[g]);
        cur.update_point(n + m, stored);
        hist.erase(hist.begin());
        hist.push_back(std::move(hat));
    }
    return cur;
}

WRResult run_sequential(const MonolithicSystem& sys, const CoupledPartition& part,
                        const WRConfig& config, SplitKind kind) {
    sys.validate();
    part.validate(sys.dim());
    check_config(sys, config);
    const auto [theta_v, theta_w] = resolve_thetas(config.relax, kind);
    check_thetas(theta_v, theta_w);

    const Subproblem sub_v(sys, part, true, config.lmm, config.grid_v);
    const Subproblem sub_w(sys, part, false, config.lmm, config.grid_w);
    const std::vector<int> glv = part.gamma_v_local();
    const std::vector<int> glw = part.gamma_w_local();
    const int m = config.lmm.m;

    Waveform v_prev = initial_iterate(sys, part.v_indices, config.grid_v, config.initial_v);
    Waveform w_prev = initial_iterate(sys, part.w_indices, config.grid_w, config.initial_w);

    const double norm0 = config.interface_norm_weight * gather(sys.u0, part.gamma_w).norm();

    const UnionGrid uni(config.grid_v, config.grid_w);
    std::vector<ShapePoint> splitting_log(static_cast<size_t>(uni.points()));
    for (int j = 1; j < uni.points(); ++j)
        splitting_log[static_cast<size_t>(j)] =
            ShapePoint{kind == SplitKind::gs_nd, kind == SplitKind::gs_dn, theta_w, theta_v};
    std::vector<StepShape> shape_log;
    shape_log.reserve(splitting_log.size());
    for (const ShapePoint& p : splitting_log) shape_log.push_back(classify(p));

    WRResult result;
    Eigen::VectorXd ug_tf_prev = gather(w_prev.at(config.grid_w.N), glw);
    for (int k = 1; k <= config.kmax; ++k) {
        const auto t0 = Clock::now();
        Waveform v_cur, w_cur;
        if (kind == SplitKind::gs_nd) {
            w_cur = sweep_side(sub_w, m, glw, theta_w, w_prev, gamma_waveform(v_prev, glv));
            v_cur = sweep_side(sub_v, m, glv, theta_v, v_prev, gamma_waveform(w_cur, glw));
        } else if (kind == SplitKind::gs_dn) {
            v_cur = sweep_side(sub_v, m, glv, theta_v, v_prev, gamma_waveform(w_prev, glw));
            w_cur = sweep_side(sub_w, m, glw, theta_w, w_prev, gamma_waveform(v_cur, glv));
        } else {
            v_cur = sweep_side(sub_v, m, glv, theta_v, v_prev, gamma_waveform(w_prev, glw));
            w_cur = sweep_side(sub_w, m, glw, theta_w, w_prev, gamma_waveform(v_prev, glv));
        }

        const Eigen::VectorXd ug_tf = gather(w_cur.at(config.grid_w.N), glw);
        IterationRecord rec;
        rec.k = k;
        rec.update_norm = config.interface_norm_weight * (ug_tf - ug_tf_prev).norm();
        rec.interface_error = interface_error_of(gamma_waveform(w_cur, glw),
                                                 config.interface_norm_weight, config.reference_ug);
        rec.wall_time = seconds_since(t0);
        rec.shape_log = shape_log;
        rec.splitting_log = splitting_log;
        result.records.push_back(std::move(rec));
        if (config.record_iterates) result.iterate_history.emplace_back(v_cur, w_cur);

        v_prev = std::move(v_cur);
        w_prev = std::move(w_cur);
        ug_tf_prev = ug_tf;
        result.iterations = k;
        if (result.records.back().update_norm <= norm0 * config.tol) {
            result.converged = true;
            break;
        }
    }
    result.v = std::move(v_prev);
    result.w = std::move(w_prev);
    return result;
}

// ---------------------------------------------------------------------------
// Asynchronous driver.  Actor 0 integrates the v side, actor 1 the w side.
// Window "ug" lives with actor 0 and receives the interface temperature the
// w side produces; window "q" lives with actor 1 and receives the flux.
// ---------------------------------------------------------------------------

struct ActorLog {
    std::vector<double> update_norm, interface_error, wall_time;
    std::vector<std::vector<signed char>> consumed; // per sweep, per union point: -1/0/1
    std::vector<std::vector<double>> theta;         // per sweep, per union point
    std::vector<Waveform> iterates;                 // per sweep when recording
    Waveform final_iterate;
    int sweeps = 0;
    bool converged = false;
};

struct AsyncContext {
    const MonolithicSystem& sys;
    const CoupledPartition& part;
    const WRConfig& config;
    const UnionGrid uni;
    const Subproblem sub_v, sub_w;
    const std::vector<int> glv, glw;
    Window win_ug, win_q; // named by the quantity they carry
    ScheduleController controller;
    double norm0 = 0.0;
    Eigen::VectorXd ug_tf0;        // interface value of the initial guess at Tf
    Waveform v_init, w_init;
    Waveform q_init_gamma, ug_init_gamma;

    // Sweep-boundary mailboxes, double-buffered by iteration parity so a
    // reader of sweep k never races the peer's deposit for sweep k+1.
    std::mutex mail_mutex;
    std::vector<char> gs_marks[2][2];            // [parity][actor]
    std::vector<Eigen::VectorXd> relaxed[2][2];  // [parity][actor]
    Eigen::VectorXd ug_tf_mail[2];               // [parity], constant relaxation only

    ActorLog logs[2];

    AsyncContext(const MonolithicSystem& sys_, const CoupledPartition& part_, const WRConfig& cfg)
        : sys(sys_),
          part(part_),
          config(cfg),
          uni(cfg.grid_v, cfg.grid_w),
          sub_v(sys_, part_, true, cfg.lmm, cfg.grid_v),
          sub_w(sys_, part_, false, cfg.lmm, cfg.grid_w),
          glv(part_.gamma_v_local()),
          glw(part_.gamma_w_local()),
          win_ug("ug", cfg.grid_w.N + 1, static_cast<int>(part_.gamma_w.size())),
          win_q("q", cfg.grid_v.N + 1, static_cast<int>(part_.gamma_v.size())),
          controller(cfg.schedule, 2),
          v_init(initial_iterate(sys_, part_.v_indices, cfg.grid_v, cfg.initial_v)),
          w_init(initial_iterate(sys_, part_.w_indices, cfg.grid_w, cfg.initial_w)),
          q_init_gamma(gamma_waveform(v_init, glv)),
          ug_init_gamma(gamma_waveform(w_init, glw)) {
        norm0 = cfg.interface_norm_weight * gather(sys_.u0, part_.gamma_w).norm();
        ug_tf0 = ug_init_gamma.at(cfg.grid_w.N);
        for (int n = 0; n <= cfg.grid_w.N; ++n) win_ug.fill_slot(n, ug_init_gamma.at(n), 0.0);
        for (int n = 0; n <= cfg.grid_v.N; ++n) win_q.fill_slot(n, q_init_gamma.at(n), 0.0);
        for (int parity = 0; parity < 2; ++parity)
            for (int actor = 0; actor < 2; ++actor) {
                gs_marks[parity][actor].assign(static_cast<size_t>(uni.points()), 0);
                relaxed[parity][actor].clear();
            }
    }
};

// Per-actor wiring that differs only by side.
struct ActorView {
    int actor;
    bool is_v;
    const Subproblem* sub;
    TimeGrid own, peer;
    Window* own_win;  // consumed from (owner side)
    Window* peer_win; // produced into (remote side)
    const std::vector<int>* gamma_local;
    const Waveform* init;
    const Waveform* peer_init_gamma;

    explicit ActorView(AsyncContext& ctx, int actor_)
        : actor(actor_), is_v(actor_ == 0) {
        sub = is_v ? &ctx.sub_v : &ctx.sub_w;
        own = is_v ? ctx.config.grid_v : ctx.config.grid_w;
        peer = is_v ? ctx.config.grid_w : ctx.config.grid_v;
        own_win = is_v ? &ctx.win_ug : &ctx.win_q;
        peer_win = is_v ? &ctx.win_q : &ctx.win_ug;
        gamma_local = is_v ? &ctx.glv : &ctx.glw;
        init = is_v ? &ctx.v_init : &ctx.w_init;
        peer_init_gamma = is_v ? &ctx.ug_init_gamma : &ctx.q_init_gamma;
    }

    int from_own(const UnionGrid& uni, int n) const { return is_v ? uni.from_v(n) : uni.from_w(n); }
    int from_peer(const UnionGrid& uni, int n) const { return is_v ? uni.from_w(n) : uni.from_v(n); }
    int to_peer(const UnionGrid& uni, int j) const { return is_v ? uni.to_w(j) : uni.to_v(j); }
};

struct EvalPoint {
    int uni_idx = -1;
    int peer_node = -1;  // >= 0 when the time is a peer grid point
    int bracket_lo = -1; // otherwise the peer interval containing it
};

std::unordered_map<double, EvalPoint> build_eval_points(const ActorView& view, const UnionGrid& uni) {
    std::unordered_map<double, EvalPoint> map;
    map.reserve(static_cast<size_t>(view.own.N + 1));
    for (int i = 0; i <= view.own.N; ++i) {
        EvalPoint ep;
        ep.uni_idx = view.from_own(uni, i);
        ep.peer_node = view.to_peer(uni, ep.uni_idx);
        if (ep.peer_node < 0)
            ep.bracket_lo = static_cast<int>((static_cast<long long>(i) * view.peer.N) / view.own.N);
        map.emplace(view.own.time(i), ep);
    }
    return map;
}

void run_constant_actor(AsyncContext& ctx, int actor, double theta_v, double theta_w) {
    const ActorView view(ctx, actor);
    const UnionGrid& uni = ctx.uni;
    const int m = ctx.config.lmm.m;
    const double theta_own = view.is_v ? theta_v : theta_w;
    const double theta_peer_quantity = view.is_v ? theta_w : theta_v;
    const double weight = ctx.config.interface_norm_weight;
    ActorLog& log = ctx.logs[actor];
    const auto eval_points = build_eval_points(view, uni);

    Waveform prev = *view.init;
    Waveform pinned(view.peer, view.own_win->value_dim());
    std::vector<signed char> slot_class(static_cast<size_t>(view.peer.N + 1), -1);
    std::vector<signed char> consumed(static_cast<size_t>(uni.points()), -1);
    Eigen::VectorXd ug_tf_prev = ctx.ug_tf0;

    bool done = false;
    for (int k = 1; !done && k <= ctx.config.kmax; ++k) {
        const auto t0 = Clock::now();
        const double kd = static_cast<double>(k);
        slot_class.assign(slot_class.size(), -1);
        consumed.assign(consumed.size(), -1);

        auto touch_slot = [&](int s) -> signed char {
            signed char& c = slot_class[static_cast<size_t>(s)];
            if (c < 0) {
                pinned.update_point(s, view.own_win->values(s));
                c = view.own_win->tag(s) == kd ? 1 : 0;
                const int j = view.from_peer(uni, s);
                if (consumed[static_cast<size_t>(j)] < 0)
                    consumed[static_cast<size_t>(j)] = (j != 0 && c == 1) ? 1 : 0;
            }
            return c;
        };
        auto cached_eval = [&](double t) -> Eigen::VectorXd {
            const EvalPoint& ep = eval_points.at(t);
            if (ep.peer_node >= 0) {
                touch_slot(ep.peer_node);
                return pinned.at(ep.peer_node);
            }
            touch_slot(ep.bracket_lo);
            touch_slot(ep.bracket_lo + 1);
            return pinned.eval(t);
        };

        Waveform cur(view.own, view.sub->dim());
        std::vector<Eigen::VectorXd> hist;
        hist.reserve(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j) {
            cur.update_point(j, prev.at(j));
            hist.push_back(prev.at(j));
        }
        for (int n = 0; n + m <= view.own.N; ++n) {
            ctx.controller.checkpoint(actor, "sync", view.own_win->name(), n, k);
            view.own_win->sync();
            Eigen::VectorXd hat = view.sub->step(n, hist, cached_eval);
            Eigen::VectorXd stored = hat;
            for (int g : *view.gamma_local)
                stored[g] = relax_combine(theta_own, hat[g], prev.at(n + m)[g]);
            cur.update_point(n + m, stored);
            hist.erase(hist.begin());
            hist.push_back(std::move(hat));
            ctx.controller.checkpoint(actor, "put", view.peer_win->name(), n, k);
            auto epoch = view.peer_win->lock(LockKind::exclusive);
            epoch.put(n + m, gather(cur.at(n + m), *view.gamma_local), kd);
            epoch.unlock();
        }

        Eigen::VectorXd ug_tf;
        if (!view.is_v) {
            ug_tf = gather(cur.at(view.own.N), *view.gamma_local);
            std::lock_guard<std::mutex> hold(ctx.mail_mutex);
            ctx.ug_tf_mail[k % 2] = ug_tf;
        }
        ctx.controller.checkpoint(actor, "sweep_end", "-", view.own.N, k);
        if (view.is_v) {
            std::lock_guard<std::mutex> hold(ctx.mail_mutex);
            ug_tf = ctx.ug_tf_mail[k % 2];
        }

        const double update = weight * (ug_tf - ug_tf_prev).norm();
        ug_tf_prev = ug_tf;
        log.update_norm.push_back(update);
        log.wall_time.push_back(seconds_since(t0));
        log.consumed.push_back(consumed);
        std::vector<double> theta_log(static_cast<size_t>(uni.points()), theta_peer_quantity);
        theta_log[0] = 1.0;
        log.theta.push_back(std::move(theta_log));
        log.interface_error.push_back(
            view.is_v ? std::numeric_limits<double>::quiet_NaN()
                      : interface_error_of(gamma_waveform(cur, *view.gamma_local), weight,
                                           ctx.config.reference_ug));
        if (ctx.config.record_iterates) log.iterates.push_back(cur);
        prev = std::move(cur);
        log.sweeps = k;
        done = update <= ctx.norm0 * ctx.config.tol;
        log.converged = done;
    }
    log.final_iterate = std::move(prev);
    ctx.controller.finish(actor);
}

void run_variable_actor(AsyncContext& ctx, int actor, const RelaxTable& table) {
    const ActorView view(ctx, actor);
    const UnionGrid& uni = ctx.uni;
    const double th_jac = table.theta_jacobi;
    const double th_gs = view.is_v ? table.theta_gs_dn : table.theta_gs_nd;
    const double weight = ctx.config.interface_norm_weight;
    ActorLog& log = ctx.logs[actor];
    const auto eval_points = build_eval_points(view, uni);
    const size_t J = static_cast<size_t>(uni.points());

    Waveform prev = *view.init;
    // The peer quantity, relaxed on the union grid: R_prev is the previous
    // iterate, R_cur collects this sweep's relaxations point by point.
    std::vector<Eigen::VectorXd> R_prev(J), R_cur;
    for (int j = 0; j < uni.points(); ++j)
        R_prev[static_cast<size_t>(j)] = view.peer_init_gamma->eval(uni.time(j));
    std::vector<signed char> mark(J), consumed(J);
    std::vector<char> relaxed_done(J);
    std::vector<double> theta_used(J);
    std::vector<Eigen::VectorXd> cache(J);
    Eigen::VectorXd ug_tf_prev = ctx.ug_tf0;

    auto window_value = [&](int j) -> Eigen::VectorXd {
        const int pn = view.to_peer(uni, j);
        if (pn >= 0) return view.own_win->values(pn);
        const int i = view.is_v ? uni.to_v(j) : uni.to_w(j);
        const int lo = static_cast<int>((static_cast<long long>(i) * view.peer.N) / view.own.N);
        const double t = uni.time(j);
        const double t0 = view.peer.time(lo), t1 = view.peer.time(lo + 1);
        const double th = (t - t0) / (t1 - t0);
        return (1.0 - th) * view.own_win->values(lo) + th * view.own_win->values(lo + 1);
    };

    bool done = false;
    for (int k = 1; !done && k <= ctx.config.kmax; ++k) {
        const auto t0 = Clock::now();
        const double kd = static_cast<double>(k);
        mark.assign(J, -1);
        consumed.assign(J, -1);
        relaxed_done.assign(J, 0);
        relaxed_done[0] = 1;
        theta_used.assign(J, 1.0);
        R_cur = R_prev;

        auto relax_point = [&](int j, bool gs) {
            assert(!relaxed_done[static_cast<size_t>(j)]);
            const double th = gs ? th_gs : th_jac;
            R_cur[static_cast<size_t>(j)] =
                relax_combine(th, window_value(j), R_prev[static_cast<size_t>(j)]);
            relaxed_done[static_cast<size_t>(j)] = 1;
            theta_used[static_cast<size_t>(j)] = th;
        };
        auto consume = [&](double t) -> Eigen::VectorXd {
            const int j = eval_points.at(t).uni_idx;
            if (consumed[static_cast<size_t>(j)] < 0) {
                cache[static_cast<size_t>(j)] = R_cur[static_cast<size_t>(j)];
                consumed[static_cast<size_t>(j)] =
                    (j != 0 && relaxed_done[static_cast<size_t>(j)]) ? 1 : 0;
            }
            return cache[static_cast<size_t>(j)];
        };

        Waveform cur(view.own, view.sub->dim());
        cur.update_point(0, prev.at(0));
        std::vector<Eigen::VectorXd> hist{prev.at(0)};
        for (int n = 0; n < view.own.N; ++n) {
            ctx.controller.checkpoint(actor, "sync", view.own_win->name(), n, k);
            view.own_win->sync();
            const EnclosingInterval e = enclosing_interval(view.own, view.peer, n);
            const bool ahead = view.own_win->tag(e.index_plus) == kd;
            const int j_lo = view.from_peer(uni, e.index_minus);
            const int j_hi = view.from_peer(uni, e.index_plus);
            for (int j = j_lo; j <= j_hi; ++j)
                if (mark[static_cast<size_t>(j)] < 0) mark[static_cast<size_t>(j)] = ahead ? 1 : 0;
            if (ahead)
                for (int j = j_lo; j <= j_hi; ++j)
                    if (!relaxed_done[static_cast<size_t>(j)])
                        relax_point(j, mark[static_cast<size_t>(j)] == 1);
            Eigen::VectorXd hat = view.sub->step(n, hist, consume);
            cur.update_point(n + 1, hat);
            hist[0] = hat;
            ctx.controller.checkpoint(actor, "put", view.peer_win->name(), n, k);
            auto epoch = view.peer_win->lock(LockKind::exclusive);
            epoch.put(n + 1, gather(hat, *view.gamma_local), kd);
            epoch.unlock();
        }

        // Sweep done on both sides: agree on the GS set, then finish the
        // relaxation of every remaining point against complete fresh data.
        {
            std::lock_guard<std::mutex> hold(ctx.mail_mutex);
            std::vector<char>& mine = ctx.gs_marks[k % 2][actor];
            for (size_t j = 0; j < J; ++j) mine[j] = mark[j] == 1 ? 1 : 0;
        }
        ctx.controller.checkpoint(actor, "sweep_sync", "-", view.own.N, k);
        std::vector<char> peer_gs;
        {
            std::lock_guard<std::mutex> hold(ctx.mail_mutex);
            peer_gs = ctx.gs_marks[k % 2][1 - actor];
        }
        ctx.controller.checkpoint(actor, "sync", view.own_win->name(), view.own.N, k);
        view.own_win->sync();
        for (int j = 1; j < uni.points(); ++j)
            if (!relaxed_done[static_cast<size_t>(j)])
                relax_point(j, mark[static_cast<size_t>(j)] == 1 || peer_gs[static_cast<size_t>(j)]);

        {
            std::lock_guard<std::mutex> hold(ctx.mail_mutex);
            ctx.relaxed[k % 2][actor] = R_cur;
        }
        ctx.controller.checkpoint(actor, "sweep_end", "-", view.own.N, k);
        std::vector<Eigen::VectorXd> peer_R;
        {
            std::lock_guard<std::mutex> hold(ctx.mail_mutex);
            peer_R = ctx.relaxed[k % 2][1 - actor];
        }
        // The peer holds the relaxed values of this side's exchanged rows;
        // fold them back into the stored iterate.
        for (int i = 1; i <= view.own.N; ++i) {
            const int j = view.from_own(uni, i);
            Eigen::VectorXd val = cur.at(i);
            const std::vector<int>& gl = *view.gamma_local;
            for (size_t g = 0; g < gl.size(); ++g)
                val[gl[g]] = peer_R[static_cast<size_t>(j)][static_cast<Eigen::Index>(g)];
            cur.update_point(i, val);
        }

        const Eigen::VectorXd ug_tf = view.is_v ? R_cur.back() : peer_R.back();
        const double update = weight * (ug_tf - ug_tf_prev).norm();
        ug_tf_prev = ug_tf;
        log.update_norm.push_back(update);
        log.wall_time.push_back(seconds_since(t0));
        log.consumed.push_back(consumed);
        log.theta.push_back(theta_used);
        double err = std::numeric_limits<double>::quiet_NaN();
        if (view.is_v && ctx.config.reference_ug) {
            err = 0.0;
            for (int i = 0; i <= ctx.config.grid_w.N; ++i) {
                const int j = uni.from_w(i);
                err = std::max(err, weight * (R_cur[static_cast<size_t>(j)] -
                                              ctx.config.reference_ug->eval(ctx.config.grid_w.time(i)))
                                                 .norm());
            }
        }
        log.interface_error.push_back(err);
        if (ctx.config.record_iterates) log.iterates.push_back(cur);
        prev = std::move(cur);
        R_prev = std::move(R_cur);
        log.sweeps = k;
        done = update <= ctx.norm0 * ctx.config.tol;
        log.converged = done;
    }
    log.final_iterate = std::move(prev);
    ctx.controller.finish(actor);
}

} // namespace

WRResult run_jacobi(const MonolithicSystem& sys, const CoupledPartition& part, const WRConfig& config) {
    return run_sequential(sys, part, config, SplitKind::jacobi);
}

WRResult run_gauss_seidel(const MonolithicSystem& sys, const CoupledPartition& part,
                          const WRConfig& config, SplitKind order) {
    if (order == SplitKind::jacobi)
        throw std::invalid_argument("run_gauss_seidel: order must be gs_dn or gs_nd");
    return run_sequential(sys, part, config, order);
}

WRResult run_async(const MonolithicSystem& sys, const CoupledPartition& part, const WRConfig& config) {
    sys.validate();
    part.validate(sys.dim());
    check_config(sys, config);
    const bool variable = std::holds_alternative<RelaxTable>(config.relax);
    if (variable && config.lmm.m != 1)
        throw std::invalid_argument("variable relaxation requires a one-step method");

    AsyncContext ctx(sys, part, config);
    auto actor_body = [&](int actor) {
        try {
            if (variable) {
                run_variable_actor(ctx, actor, std::get<RelaxTable>(config.relax));
            } else {
                const auto ct = std::get<ConstantTheta>(config.relax);
                check_thetas(ct.theta_v, ct.theta_w);
                run_constant_actor(ctx, actor, ct.theta_v, ct.theta_w);
            }
        } catch (const std::exception& e) {
            ctx.controller.fail(actor, e.what());
            throw;
        }
    };
    auto fut0 = std::async(std::launch::async, actor_body, 0);
    auto fut1 = std::async(std::launch::async, actor_body, 1);
    std::exception_ptr err;
    try {
        fut0.get();
    } catch (...) {
        err = std::current_exception();
    }
    try {
        fut1.get();
    } catch (...) {
        if (!err) err = std::current_exception();
    }
    if (err) std::rethrow_exception(err);

    ActorLog& lv = ctx.logs[0];
    ActorLog& lw = ctx.logs[1];
    if (lv.sweeps != lw.sweeps || lv.converged != lw.converged)
        throw std::logic_error("async actors disagree on the termination decision");

    WRResult result;
    result.v = std::move(lv.final_iterate);
    result.w = std::move(lw.final_iterate);
    result.converged = lw.converged;
    result.iterations = lw.sweeps;
    result.trace = ctx.controller.trace();
    for (int i = 0; i < lw.sweeps; ++i) {
        IterationRecord rec;
        rec.k = i + 1;
        rec.update_norm = lw.update_norm[static_cast<size_t>(i)];
        rec.interface_error = variable ? lv.interface_error[static_cast<size_t>(i)]
                                       : lw.interface_error[static_cast<size_t>(i)];
        rec.wall_time = std::max(lv.wall_time[static_cast<size_t>(i)],
                                 lw.wall_time[static_cast<size_t>(i)]);
        rec.splitting_log.resize(static_cast<size_t>(ctx.uni.points()));
        for (int j = 0; j < ctx.uni.points(); ++j) {
            ShapePoint& p = rec.splitting_log[static_cast<size_t>(j)];
            p.fresh_ug = lv.consumed[static_cast<size_t>(i)][static_cast<size_t>(j)] == 1;
            p.fresh_q = lw.consumed[static_cast<size_t>(i)][static_cast<size_t>(j)] == 1;
            p.theta_ug = lv.theta[static_cast<size_t>(i)][static_cast<size_t>(j)];
            p.theta_q = lw.theta[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
        rec.shape_log.reserve(rec.splitting_log.size());
        for (const ShapePoint& p : rec.splitting_log) rec.shape_log.push_back(classify(p));
        result.records.push_back(std::move(rec));
        if (config.record_iterates)
            result.iterate_history.emplace_back(lv.iterates[static_cast<size_t>(i)],
                                                lw.iterates[static_cast<size_t>(i)]);
    }
    return result;
}

WRResult run_wr(const MonolithicSystem& sys, const CoupledPartition& part, const WRConfig& config) {
    switch (config.method) {
        case WRMethod::jacobi: return run_jacobi(sys, part, config);
        case WRMethod::gs_dn: return run_gauss_seidel(sys, part, config, SplitKind::gs_dn);
        case WRMethod::gs_nd: return run_gauss_seidel(sys, part, config, SplitKind::gs_nd);
        case WRMethod::async: return run_async(sys, part, config);
    }
    throw std::logic_error("run_wr: invalid method");
}

Waveform interface_trace(const WRResult& result, const CoupledPartition& part) {
    return gamma_waveform(result.w, part.gamma_w_local());
}

} // namespace awr
