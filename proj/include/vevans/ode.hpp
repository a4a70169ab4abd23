#pragma once

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "vevans/errors.hpp"

namespace vevans {

using State = std::vector<double>;

struct OdeTolerances {
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    double h_max = 0.0;  // 0: unbounded
};

enum class StepAction { Stop, Continue, Modified, Reject };

// Adaptive Dormand-Prince 4(5) from t0 toward t_end (either direction). After each accepted
// step obs(t, x) is called; it returns false/true (stop/continue) or a StepAction, where
// Modified means the observer changed x in place and Reject retakes the step at half the size.
// Returns the final time.
template <class System, class Observer>
double integrate_rk45(System&& sys, State& x, double t0, double t_end, const OdeTolerances& tol,
                      Observer&& obs, double dt0 = 0.0) {
    namespace ode = boost::numeric::odeint;
    using Stepper = ode::runge_kutta_dopri5<State>;
    auto stepper = ode::make_controlled(tol.abs_tol, tol.rel_tol, tol.h_max, Stepper());
    // Backward runs integrate the reversed field in tau = dir (t - t0): the step-size cap of
    // the controlled stepper does not preserve the sign of negative steps.
    double dir = t_end >= t0 ? 1.0 : -1.0;
    auto rsys = [&](const State& xs, State& dx, double tau) {
        sys(xs, dx, t0 + dir * tau);
        if (dir < 0)
            for (auto& v : dx) v = -v;
    };
    double tau_end = dir * (t_end - t0);
    double tau = 0.0;
    double dt = dt0 > 0 ? dt0 : (tol.h_max > 0 ? std::min(1e-2, tol.h_max) : 1e-2);
    State saved;
    int rejects = 0;
    while (tau_end - tau > 0.0) {
        if (tau + dt > tau_end) dt = tau_end - tau;
        double prev = tau;
        saved = x;
        int fails = 0;
        while (stepper.try_step(rsys, x, tau, dt) == ode::fail) {
            if (dt < 1e-13 * (1.0 + std::abs(tau)) || ++fails > 500)
                throw StiffFailure("step size underflow at t=" + std::to_string(t0 + dir * tau), t0 + dir * tau);
        }
        if (tau == prev) throw StiffFailure("no progress at t=" + std::to_string(t0 + dir * tau), t0 + dir * tau);
        for (double v : x)
            if (!std::isfinite(v))
                throw StiffFailure("non-finite state at t=" + std::to_string(t0 + dir * tau), t0 + dir * tau);
        auto act = obs(t0 + dir * tau, x);
        if constexpr (std::is_same_v<decltype(act), bool>) {
            if (!act) break;
        } else {
            if (act == StepAction::Stop) break;
            if (act == StepAction::Modified) stepper.reset();  // cached FSAL derivative is stale
            if (act == StepAction::Reject) {
                if (++rejects > 60)
                    throw StiffFailure("step rejected repeatedly at t=" + std::to_string(t0 + dir * prev),
                                       t0 + dir * prev);
                dt = 0.5 * (tau - prev);
                tau = prev;
                x = saved;
                stepper.reset();
                continue;
            }
            rejects = 0;
        }
    }
    return t0 + dir * tau;
}

}  // namespace vevans
