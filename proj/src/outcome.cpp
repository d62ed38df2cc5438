#include "nonprob/outcome.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nonprob/errors.hpp"
#include "nonprob/link.hpp"
#include "nonprob/newton.hpp"

namespace nonprob {

OutcomeFit fit_linear(const NonProbSample& a, const ColumnList& columns) {
    const Matrix x = a.covariates().design(columns);
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(1e-12);
    if (qr.rank() < x.cols()) throw SingularMatrixError("fit_linear: singular Gram matrix");
    OutcomeFit fit;
    fit.columns = columns;
    fit.beta = qr.solve(a.responses());
    fit.link = Link::Linear;
    return fit;
}

OutcomeFit fit_logistic_outcome(const NonProbSample& a, const ColumnList& columns, const NewtonOptions& opts) {
    const Matrix x = a.covariates().design(columns);
    const Vector& y = a.responses();
    if (((y.array() != 0.0) && (y.array() != 1.0)).any()) {
        throw DomainError("fit_logistic_outcome: response must be 0/1");
    }
    ConcaveObjective f{
        [&](const Vector& t) {
            const Vector eta = x * t;
            return y.dot(eta) - eta.unaryExpr([](double e) { return log1p_exp(e); }).sum();
        },
        [&](const Vector& t) { return bernoulli_score(t, x, y); },
        [&](const Vector& t) {
            const Vector w = (x * t).unaryExpr([](double e) { return logistic_variance(e); });
            Matrix h = x.transpose() * w.asDiagonal() * x;
            return Matrix(0.5 * (h + h.transpose()));
        },
    };
    const auto res = maximize_concave(f, Vector::Zero(x.cols()), opts, 1.0, "fit_logistic_outcome");
    OutcomeFit fit;
    fit.columns = columns;
    fit.beta = res.x;
    fit.link = Link::Logistic;
    return fit;
}

OutcomeFit fit_outcome(const NonProbSample& a, const ColumnList& columns, Link link, const NewtonOptions& opts) {
    return link == Link::Linear ? fit_linear(a, columns) : fit_logistic_outcome(a, columns, opts);
}

PropensityFit KhFit::propensity_fit(const NonProbSample& a) const {
    PropensityFit fit;
    fit.columns = propensity_columns;
    fit.theta = theta;
    fit.converged = true;
    fit.iterations = iterations;
    fit.final_score_norm = residual_norm;
    fit.pi_A_hat = fit.propensities(a.covariates());
    return fit;
}

OutcomeFit KhFit::outcome_fit() const {
    return OutcomeFit{outcome_columns, beta, link};
}

namespace {

// Precomputed design matrices for the stacked KH system.
struct KhSystem {
    Matrix xa_p, xb_p;  // propensity columns
    Matrix xa_o, xb_o;  // outcome columns
    Vector y, db;
    double n_pop;
    Link link;
    bool shared;

    struct Eval {
        Vector g;
        Matrix jac;
    };

    // mdot rows and, when needed, their beta-derivative weights m(1-m)(1-2m).
    Eval eval(const Vector& theta, const Vector& beta, bool with_jacobian) const {
        const Eigen::Index pt = theta.size();
        const Eigen::Index pb = beta.size();
        const Vector eta = xa_p * theta;
        const Vector u = (-eta.array()).exp().matrix();  // 1/pi - 1
        const Vector ma = mean_function_rows(xa_o, beta, link);
        const Vector r = y - ma;

        // mdot_i = s_i * x_o,i with s = 1 (linear) or m(1-m) (logistic).
        auto slope = [&](const Vector& m) -> Vector {
            if (link == Link::Linear) return Vector::Ones(m.size());
            return m.array() * (1.0 - m.array());
        };
        const Vector sa = slope(ma);

        const Matrix& h_a = shared ? xa_p : xa_o;  // first block covariates
        Eval out;
        out.g.resize(pt + pb);
        // First block: pt rows when shared (= pb), pb rows otherwise.
        const Eigen::Index n1 = h_a.cols();
        out.g.head(n1) = h_a.transpose() * u.cwiseProduct(r);

        Vector g2;
        if (shared) {
            const Vector mb = mean_function_rows(xb_o, beta, link);
            const Vector sb = slope(mb);
            g2 = xa_o.transpose() * (Vector::Ones(u.size()) + u).cwiseProduct(sa) - xb_o.transpose() * db.cwiseProduct(sb);
        } else {
            g2 = xa_p.transpose() * (Vector::Ones(u.size()) + u) - xb_p.transpose() * db;
        }
        out.g.tail(g2.size()) = g2;
        out.g /= n_pop;
        if (!with_jacobian) return out;

        // Unknown order: theta then beta. Equation order: first block then second.
        Matrix j = Matrix::Zero(pt + pb, pt + pb);
        j.block(0, 0, n1, pt) = -h_a.transpose() * u.cwiseProduct(r).asDiagonal() * xa_p;
        j.block(0, pt, n1, pb) = -h_a.transpose() * u.cwiseProduct(sa).asDiagonal() * xa_o;
        const Eigen::Index n2 = g2.size();
        if (shared) {
            j.block(n1, 0, n2, pt) = -xa_o.transpose() * u.cwiseProduct(sa).asDiagonal() * xa_p;
            if (link == Link::Logistic) {
                const Vector mb = mean_function_rows(xb_o, beta, link);
                auto curv = [](const Vector& m) -> Vector {
                    return m.array() * (1.0 - m.array()) * (1.0 - 2.0 * m.array());
                };
                const Vector wa = (Vector::Ones(u.size()) + u).cwiseProduct(curv(ma));
                const Vector wb = db.cwiseProduct(curv(mb));
                j.block(n1, pt, n2, pb) =
                    xa_o.transpose() * wa.asDiagonal() * xa_o - xb_o.transpose() * wb.asDiagonal() * xb_o;
            }
        } else {
            j.block(n1, 0, n2, pt) = -xa_p.transpose() * u.asDiagonal() * xa_p;
        }
        out.jac = j / n_pop;
        return out;
    }
};

bool same_columns(const ColumnList& a, const ColumnList& b) { return a == b; }

}  // namespace

Vector kh_equations(const Vector& theta, const Vector& beta, const NonProbSample& a, const ProbSample& b,
                    double population_size, const ColumnList& propensity_columns,
                    const ColumnList& outcome_columns, Link link) {
    const bool shared = same_columns(propensity_columns, outcome_columns);
    if (!shared && link != Link::Linear) {
        throw DimensionError("kh: a logistic outcome requires the propensity and outcome column sets to match");
    }
    if (!(population_size > 0.0)) throw DomainError("kh: population size must be positive");
    KhSystem sys{a.covariates().design(propensity_columns), b.covariates().design(propensity_columns),
                 a.covariates().design(outcome_columns),    b.covariates().design(outcome_columns),
                 a.responses(),                            b.weights(),
                 population_size,                          link,
                 shared};
    if (theta.size() != sys.xa_p.cols() || beta.size() != sys.xa_o.cols()) {
        throw DimensionError("kh: parameter lengths differ from column counts");
    }
    return sys.eval(theta, beta, false).g;
}

KhFit fit_kh_joint(const NonProbSample& a, const ProbSample& b, double population_size,
                   const ColumnList& propensity_columns, const ColumnList& outcome_columns, Link link,
                   const NewtonOptions& opts) {
    opts.validate();
    const bool shared = same_columns(propensity_columns, outcome_columns);
    if (!shared && link != Link::Linear) {
        throw DimensionError("fit_kh_joint: a logistic outcome requires the propensity and outcome column sets to match");
    }
    if (!(population_size > 0.0)) throw DomainError("fit_kh_joint: population size must be positive");

    KhSystem sys{a.covariates().design(propensity_columns), b.covariates().design(propensity_columns),
                 a.covariates().design(outcome_columns),    b.covariates().design(outcome_columns),
                 a.responses(),                            b.weights(),
                 population_size,                          link,
                 shared};

    Vector theta = fit_propensity(a, b, propensity_columns, opts).theta;
    Vector beta = fit_outcome(a, outcome_columns, link, opts).beta;
    const Eigen::Index pt = theta.size();
    const Eigen::Index pb = beta.size();

    auto merit = [](const Vector& g) { return g.allFinite() ? g.squaredNorm() : std::numeric_limits<double>::infinity(); };

    auto current = sys.eval(theta, beta, true);
    for (int it = 0; it <= opts.max_iterations; ++it) {
        double gnorm = current.g.lpNorm<Eigen::Infinity>();
        if (gnorm <= opts.tolerance) {
            // Polish: full steps while they keep shrinking the residual.
            for (int k = 0; k < 3; ++k) {
                Eigen::FullPivLU<Matrix> lu(current.jac);
                if (!lu.isInvertible()) break;
                const Vector step = lu.solve(-current.g);
                auto next = sys.eval(theta + step.head(pt), beta + step.tail(pb), true);
                const double nn = next.g.lpNorm<Eigen::Infinity>();
                if (!(nn < gnorm)) break;
                theta += step.head(pt);
                beta += step.tail(pb);
                current = std::move(next);
                gnorm = nn;
            }
            const Vector u = (-(sys.xa_p * theta).array()).exp().matrix();
            if (u.maxCoeff() < 1e-12) {
                throw DomainError("fit_kh_joint: residual weights 1/pi - 1 vanish; outcome coefficients not identified");
            }
            KhFit fit;
            fit.theta = theta;
            fit.beta = beta;
            fit.propensity_columns = propensity_columns;
            fit.outcome_columns = outcome_columns;
            fit.link = link;
            fit.iterations = it;
            fit.residual_norm = gnorm;
            return fit;
        }
        if (it == opts.max_iterations) break;

        Eigen::FullPivLU<Matrix> lu(current.jac);
        if (!lu.isInvertible()) {
            throw SingularMatrixError("fit_kh_joint: singular Jacobian at Newton iteration " + std::to_string(it), it);
        }
        const Vector step = lu.solve(-current.g);
        const double m0 = merit(current.g);
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.step_halving_max; ++h, t *= 0.5) {
            const Vector tn = theta + t * step.head(pt);
            const Vector bn = beta + t * step.tail(pb);
            auto next = sys.eval(tn, bn, true);
            if (merit(next.g) < m0) {
                theta = tn;
                beta = bn;
                current = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            Vector last(pt + pb);
            last << theta, beta;
            throw NotConvergedError("fit_kh_joint: no decrease after step halving at iteration " + std::to_string(it),
                                    last, gnorm, it);
        }
    }
    Vector last(pt + pb);
    last << theta, beta;
    throw NotConvergedError("fit_kh_joint: no convergence after " + std::to_string(opts.max_iterations) + " iterations",
                            last, current.g.lpNorm<Eigen::Infinity>(), opts.max_iterations);
}

KhFit fit_kh_joint(const NonProbSample& a, const ProbSample& b, double population_size, const NewtonOptions& opts) {
    const auto& cols = a.covariates().names();
    return fit_kh_joint(a, b, population_size, cols, cols, Link::Linear, opts);
}

}  // namespace nonprob
