#pragma once

// Derivative-free local minimization: thin wrapper over GSL's Nelder-Mead simplex
// (nmsimplex2) with one restart from the converged point.

#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "posicone/tensor_space.hpp"

namespace posicone {

struct NelderMeadOptions {
    int max_iter = 2000;
    double initial_step = 0.5;
    double size_tol = 1e-9;
    int restarts = 1;
};

struct MinResult {
    Vec x;
    double f = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

namespace detail {

template <class F> double gsl_trampoline(const gsl_vector *v, void *params) {
    auto &fn = *static_cast<F *>(params);
    const Eigen::Map<const Vec> x(v->data, static_cast<Eigen::Index>(v->size));
    const double y = fn(Vec(x));
    return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

struct GslVectorFree {
    void operator()(gsl_vector *v) const { gsl_vector_free(v); }
};
struct GslMinimizerFree {
    void operator()(gsl_multimin_fminimizer *m) const { gsl_multimin_fminimizer_free(m); }
};

inline void silence_gsl() {
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

} // namespace detail

template <class F> MinResult nelder_mead(F &&f, const Vec &x0, const NelderMeadOptions &opt = {}) {
    using Fn = std::remove_reference_t<F>;
    detail::silence_gsl();
    const std::size_t n = static_cast<std::size_t>(x0.size());
    MinResult best;
    best.x = x0;
    best.f = f(x0);
    if (n == 0) return best;

    gsl_multimin_function func;
    func.n = n;
    func.f = &detail::gsl_trampoline<Fn>;
    func.params = const_cast<void *>(static_cast<const void *>(&f));

    std::unique_ptr<gsl_vector, detail::GslVectorFree> x(gsl_vector_alloc(n)), step(gsl_vector_alloc(n));
    std::unique_ptr<gsl_multimin_fminimizer, detail::GslMinimizerFree> m(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));

    double step_size = opt.initial_step;
    for (int round = 0; round <= opt.restarts; ++round) {
        for (std::size_t a = 0; a < n; ++a) gsl_vector_set(x.get(), a, best.x(static_cast<Eigen::Index>(a)));
        gsl_vector_set_all(step.get(), step_size);
        gsl_multimin_fminimizer_set(m.get(), &func, x.get(), step.get());
        int it = 0;
        for (; it < opt.max_iter; ++it) {
            if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), opt.size_tol) == GSL_SUCCESS) break;
        }
        best.iterations += it;
        const double fv = gsl_multimin_fminimizer_minimum(m.get());
        if (fv <= best.f) {
            best.f = fv;
            const gsl_vector *xm = gsl_multimin_fminimizer_x(m.get());
            for (std::size_t a = 0; a < n; ++a) best.x(static_cast<Eigen::Index>(a)) = gsl_vector_get(xm, a);
        }
        step_size *= 0.1;
    }
    return best;
}

} // namespace posicone
