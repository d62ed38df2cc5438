#include "nonprob/newton.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nonprob/errors.hpp"

namespace nonprob {

Vector solve_spd(const Matrix& h, const Vector& rhs, int iteration) {
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() == Eigen::Success) {
        Vector x = llt.solve(rhs);
        if (x.allFinite()) return x;
    }
    const double ridge = 1e-10 * h.trace() / static_cast<double>(h.rows());
    if (ridge > 0.0 && std::isfinite(ridge)) {
        Matrix hr = h;
        hr.diagonal().array() += ridge;
        llt.compute(hr);
        if (llt.info() == Eigen::Success) {
            Vector x = llt.solve(rhs);
            if (x.allFinite()) return x;
        }
    }
    std::string msg = "singular information matrix";
    if (iteration >= 0) msg += " at Newton iteration " + std::to_string(iteration);
    throw SingularMatrixError(msg, iteration);
}

namespace {

double safe_value(const ConcaveObjective& f, const Vector& x) {
    if (!x.allFinite()) return -std::numeric_limits<double>::infinity();
    try {
        const double v = f.value(x);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

}  // namespace

NewtonResult maximize_concave(const ConcaveObjective& f, Vector start, const NewtonOptions& opts, double scale,
                              const char* what) {
    opts.validate();
    Vector x = std::move(start);
    double fx = f.value(x);
    Vector g = f.gradient(x);
    const double tol = opts.tolerance * scale;

    for (int it = 0; it <= opts.max_iterations; ++it) {
        const double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= tol) {
            // One extra full step squeezes the score down to rounding level.
            try {
                const Vector xp = x + solve_spd(f.information(x), g, it);
                const Vector gp = f.gradient(xp);
                if (gp.allFinite() && gp.lpNorm<Eigen::Infinity>() < gnorm) {
                    x = xp;
                    g = gp;
                }
            } catch (const Error&) {
            }
            return {x, it, g.lpNorm<Eigen::Infinity>() / scale};
        }
        if (it == opts.max_iterations) break;

        const Vector step = solve_spd(f.information(x), g, it);
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.step_halving_max; ++h, t *= 0.5) {
            const Vector xn = x + t * step;
            const double fn = safe_value(f, xn);
            if (fn >= fx - slack) {
                x = xn;
                fx = fn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw NotConvergedError(std::string(what) + ": no ascent after step halving at iteration " +
                                        std::to_string(it),
                                    x, gnorm / scale, it);
        }
        g = f.gradient(x);
        if (!g.allFinite()) {
            throw NotConvergedError(std::string(what) + ": non-finite score at iteration " + std::to_string(it), x,
                                    std::numeric_limits<double>::infinity(), it);
        }
    }
    throw NotConvergedError(std::string(what) + ": no convergence after " + std::to_string(opts.max_iterations) +
                                " iterations",
                            x, g.lpNorm<Eigen::Infinity>() / scale, opts.max_iterations);
}

}  // namespace nonprob
