#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "nonprob/link.hpp"
#include "nonprob/rng.hpp"
#include "nonprob/types.hpp"

namespace testing {

using nonprob::ColumnList;
using nonprob::Matrix;
using nonprob::Vector;

inline ColumnList names_for(int k) {
    ColumnList out;
    for (int j = 1; j <= k; ++j) out.push_back("x" + std::to_string(j));
    return out;
}

inline Matrix with_intercept(const Matrix& x) {
    Matrix out(x.rows(), x.cols() + 1);
    out.col(0).setOnes();
    out.rightCols(x.cols()) = x;
    return out;
}

// Small population-free instance: A rows carry y from a linear model, B rows
// carry weights summing to roughly `n_pop`.
struct Instance {
    nonprob::NonProbSample a;
    nonprob::ProbSample b;
    double n_pop = 0.0;
};

inline Instance random_instance(std::uint64_t seed, int n_a, int n_b, int k, double n_pop = 0.0) {
    nonprob::SplitMix64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.5, 1.5);
    if (n_pop <= 0.0) n_pop = 4.0 * (n_a + n_b);
    Matrix xa(n_a, k), xb(n_b, k);
    // A is shifted so the propensity has a non-trivial maximizer.
    for (int i = 0; i < n_a; ++i)
        for (int j = 0; j < k; ++j) xa(i, j) = z(rng) + 0.4;
    for (int i = 0; i < n_b; ++i)
        for (int j = 0; j < k; ++j) xb(i, j) = z(rng);
    Vector ya(n_a);
    for (int i = 0; i < n_a; ++i) ya(i) = 1.0 + xa.row(i).sum() + z(rng);
    Vector d(n_b);
    for (int i = 0; i < n_b; ++i) d(i) = u(rng);
    d *= n_pop / d.sum();
    const auto names = names_for(k);
    Instance inst{nonprob::NonProbSample(nonprob::Covariates(names, with_intercept(xa)), ya),
                  nonprob::ProbSample(nonprob::Covariates(names, with_intercept(xb)), d), n_pop};
    return inst;
}

// Central finite-difference gradient with step h.
template <class F>
Vector fd_gradient(F&& f, const Vector& x, double h = 1e-5) {
    Vector g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        g(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

// Grid-refinement maximizer over a box: evaluate an 11^p lattice, recentre on
// the best point, halve the box, repeat until the half-width is below tol.
template <class F>
Vector grid_maximize(F&& f, int p, double half_width = 16.0, double tol = 1e-9) {
    Vector centre = Vector::Zero(p);
    constexpr int kPts = 11;
    while (half_width > tol) {
        Vector best = centre;
        double best_val = f(centre);
        std::vector<int> idx(p, 0);
        for (;;) {
            Vector x(p);
            for (int j = 0; j < p; ++j) x(j) = centre(j) - half_width + 2.0 * half_width * idx[j] / (kPts - 1);
            const double v = f(x);
            if (v > best_val) {
                best_val = v;
                best = x;
            }
            int j = 0;
            while (j < p && ++idx[j] == kPts) idx[j++] = 0;
            if (j == p) break;
        }
        centre = best;
        half_width *= 0.5;
    }
    return centre;
}

}  // namespace testing
