#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dgsense/codebook.hpp"
#include "dgsense/parallel.hpp"

namespace dgsense {

class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& msg, std::vector<double> trace)
        : std::runtime_error(msg), objective_trace(std::move(trace)) {}
    std::vector<double> objective_trace;
};

struct SparseSignal {
    std::int64_t length = 0;
    std::vector<std::int64_t> support;  // sorted
    Eigen::VectorXcd dense;
};

/// k-sparse signal with uniformly random support and iid +-amplitude entries.
inline SparseSignal generate_signal(std::int64_t C, int k, std::uint64_t seed, double amplitude = 1.0) {
    if (k < 1 || k > C) throw std::invalid_argument("generate_signal: need 1 <= k <= C");
    std::mt19937_64 rng(seed);
    SparseSignal s;
    s.length = C;
    s.dense = Eigen::VectorXcd::Zero(C);
    // partial Fisher-Yates over implicit indices (sparse swap map)
    std::unordered_map<std::int64_t, std::int64_t> swapped;
    auto at = [&](std::int64_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    for (int j = 0; j < k; ++j) {
        std::int64_t i = std::uniform_int_distribution<std::int64_t>(j, C - 1)(rng);
        std::int64_t vi = at(i);
        swapped[i] = at(j);
        swapped[j] = vi;
        s.support.push_back(vi);
    }
    for (auto idx : s.support) {
        double sign = (rng() & 1) ? 1.0 : -1.0;
        s.dense(idx) = sign * amplitude;
    }
    std::sort(s.support.begin(), s.support.end());
    return s;
}

struct LinearOperator {
    std::int64_t rows = 0, cols = 0;
    std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> apply_fn, adjoint_fn;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        if (v.size() != cols) throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
        return apply_fn(v);
    }
    Eigen::VectorXcd adjoint(const Eigen::VectorXcd& u) const {
        if (u.size() != rows) throw std::invalid_argument("LinearOperator::adjoint: dimension mismatch");
        return adjoint_fn(u);
    }

    static LinearOperator from_dense(std::shared_ptr<const Eigen::MatrixXcd> M) {
        LinearOperator op;
        op.rows = M->rows();
        op.cols = M->cols();
        op.apply_fn = [M](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return (*M) * v; };
        op.adjoint_fn = [M](const Eigen::VectorXcd& u) -> Eigen::VectorXcd { return M->adjoint() * u; };
        return op;
    }

    static LinearOperator from_spec(const CodebookSpec& spec) {
        LinearOperator op;
        op.rows = spec.num_rows();
        op.cols = static_cast<std::int64_t>(spec.num_columns());
        op.apply_fn = [spec](const Eigen::VectorXcd& v) { return dgsense::apply(spec, v); };
        op.adjoint_fn = [spec](const Eigen::VectorXcd& u) { return dgsense::apply_adjoint(spec, u); };
        return op;
    }
};

struct MeasureResult {
    Eigen::VectorXcd f;
    double effective_sigma_sq = 0;  // (C/N) sigma_d^2 + sigma_m^2
};

/// f = Phi (alpha + eps) + e with real Gaussian noise in both domains, drawn
/// from independent substreams of `seed` so that enabling one domain does not
/// shift the other's draws.
inline MeasureResult measure(const LinearOperator& op, const SparseSignal& alpha, double sigma_m,
                             double sigma_d, std::uint64_t seed) {
    if (sigma_m < 0 || sigma_d < 0) throw std::invalid_argument("measure: negative noise level");
    Eigen::VectorXcd input = alpha.dense;
    if (sigma_d > 0) {
        std::mt19937_64 rng(mix_seed(seed, 0xdadaull));
        std::normal_distribution<double> gauss(0.0, sigma_d);
        for (std::int64_t i = 0; i < input.size(); ++i) input(i) += gauss(rng);
    }
    MeasureResult out;
    out.f = op.apply(input);
    if (sigma_m > 0) {
        std::mt19937_64 rng(mix_seed(seed, 0x3ea5ull));
        std::normal_distribution<double> gauss(0.0, sigma_m);
        for (std::int64_t i = 0; i < out.f.size(); ++i) out.f(i) += gauss(rng);
    }
    const double red = static_cast<double>(op.cols) / op.rows;
    out.effective_sigma_sq = red * sigma_d * sigma_d + sigma_m * sigma_m;
    return out;
}

/// Regularization weight: 1e-9 in the noiseless regime, otherwise
/// 2 sqrt(2 log C) sigma^2.
inline double select_lambda(std::int64_t C, double sigma_sq, bool noiseless) {
    if (sigma_sq < 0) throw std::invalid_argument("select_lambda: negative variance");
    if (noiseless) return 1e-9;
    return 2.0 * std::sqrt(2.0 * std::log(static_cast<double>(C))) * sigma_sq;
}

/// Magnitude shrinkage preserving phase.
inline Eigen::VectorXcd soft_threshold(const Eigen::VectorXcd& u, double tau) {
    return u.unaryExpr([tau](std::complex<double> v) {
        double mag = std::abs(v);
        if (mag <= tau) return std::complex<double>{0.0, 0.0};
        return v * ((mag - tau) / mag);
    });
}

struct LassoProblem {
    LinearOperator op;
    Eigen::VectorXcd f;
    double lambda = 0;
    int max_iters = 5000;
    double tol = 1e-10;        // relative objective change
    int accept_window = 5;     // nonmonotone acceptance history
    bool continuation = true;  // warm-started lambda path for tiny targets
};

struct RecoveryResult {
    Eigen::VectorXcd estimate;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // accepted objectives at the target lambda
    std::vector<std::int64_t> recovered_support;
    double zero_one_loss = -1;
    double wall_time_s = 0;
};

/// max_j of the KKT violation of min 1/2 ||f - Phi x||^2 + lambda ||x||_1:
/// |g_j| <= lambda at zeros and g_j = lambda x_j/|x_j| on the support,
/// with g = Phi^dag (f - Phi x).
inline double kkt_residual(const LinearOperator& op, const Eigen::VectorXcd& f,
                           const Eigen::VectorXcd& x, double lambda) {
    Eigen::VectorXcd g = op.adjoint(f - op.apply(x));
    double worst = 0;
    for (std::int64_t j = 0; j < x.size(); ++j) {
        double mag = std::abs(x(j));
        if (mag > 0)
            worst = std::max(worst, std::abs(g(j) - lambda * x(j) / mag));
        else
            worst = std::max(worst, std::max(0.0, std::abs(g(j)) - lambda));
    }
    return worst;
}

namespace detail {

struct SparsaState {
    Eigen::VectorXcd x, resid, grad;
    double obj = 0;
    int iterations = 0;
};

/// One lambda stage of the proximal-gradient scheme: Barzilai-Borwein steps,
/// nonmonotone acceptance over a short window, complex soft-threshold prox.
inline bool sparsa_stage(const LinearOperator& op, const Eigen::VectorXcd& f, double lambda,
                         double tol, int iter_budget, int window, SparsaState& st,
                         std::vector<double>* trace, double divergence_cap) {
    constexpr double kStepMin = 1e-8, kStepMax = 1e8, kAcceptSigma = 0.01, kEtaGrow = 2.0;
    auto objective = [&](const Eigen::VectorXcd& x, const Eigen::VectorXcd& r) {
        return 0.5 * r.squaredNorm() + lambda * x.lpNorm<1>();
    };
    st.obj = objective(st.x, st.resid);
    if (trace) trace->push_back(st.obj);
    std::vector<double> window_objs{st.obj};
    double gnorm2 = st.grad.squaredNorm();
    if (gnorm2 == 0) return true;
    Eigen::VectorXcd ag = op.apply(st.grad);
    double eta = ag.squaredNorm() / gnorm2;  // steepest-descent scale
    if (!(eta > 0) || !std::isfinite(eta)) eta = 1.0;
    for (int it = 0; it < iter_budget; ++it) {
        Eigen::VectorXcd xc, dx, adx, rc;
        double objc = 0;
        for (;;) {
            double step = std::clamp(1.0 / eta, kStepMin, kStepMax);
            xc = soft_threshold(st.x - step * st.grad, step * lambda);
            dx = xc - st.x;
            double dn2 = dx.squaredNorm();
            if (dn2 == 0) return true;  // prox fixpoint
            adx = op.apply(dx);
            rc = st.resid + adx;
            objc = objective(xc, rc);
            double bar = *std::max_element(window_objs.begin(), window_objs.end()) -
                         0.5 * kAcceptSigma * eta * dn2;
            if (objc <= bar || step <= kStepMin * (1 + 1e-12)) break;
            eta *= kEtaGrow;
        }
        // BB step for the next iteration: <dx, dg> / <dx, dx> = ||A dx||^2 / ||dx||^2
        double dn2 = dx.squaredNorm(), an2 = adx.squaredNorm();
        eta = (dn2 > 0 && an2 > 0 && std::isfinite(an2 / dn2)) ? an2 / dn2 : 1.0;
        double prev = st.obj;
        st.x.swap(xc);
        st.resid.swap(rc);
        st.grad = op.adjoint(st.resid);
        st.obj = objc;
        ++st.iterations;
        if (trace) trace->push_back(st.obj);
        window_objs.push_back(st.obj);
        if (static_cast<int>(window_objs.size()) > window)
            window_objs.erase(window_objs.begin());
        if (st.obj > divergence_cap)
            throw solver_error("lasso_solve: objective diverged",
                               trace ? *trace : std::vector<double>{});
        if (std::abs(st.obj - prev) <= tol * std::max(prev, 1e-300)) return true;
    }
    return false;
}

}  // namespace detail

/// SpaRSA-style solver for min 1/2 ||f - Phi x||^2 + lambda ||x||_1 over
/// complex x. Tiny regularization targets run through a geometric
/// warm-started lambda path before the final stage.
inline RecoveryResult lasso_solve(const LassoProblem& prob) {
    if (prob.lambda < 0) throw std::invalid_argument("lasso_solve: lambda must be nonnegative");
    auto t0 = std::chrono::steady_clock::now();
    RecoveryResult out;
    detail::SparsaState st;
    st.x = Eigen::VectorXcd::Zero(prob.op.cols);
    st.resid = -prob.f;
    st.grad = prob.op.adjoint(st.resid);
    const double obj0 = 0.5 * prob.f.squaredNorm();
    const double divergence_cap = 10.0 * obj0 + 1e-9;

    std::vector<double> lambda_path;
    const double lambda_max = st.grad.cwiseAbs().maxCoeff();
    if (prob.continuation && lambda_max > 0 && prob.lambda < 0.05 * lambda_max) {
        for (double l = 0.5 * lambda_max; l > prob.lambda; l *= 0.25) lambda_path.push_back(l);
    }
    lambda_path.push_back(prob.lambda);

    int budget = prob.max_iters;
    bool converged = false;
    for (std::size_t s = 0; s < lambda_path.size(); ++s) {
        const bool final_stage = s + 1 == lambda_path.size();
        const double stage_tol = final_stage ? prob.tol : std::max(prob.tol, 1e-6);
        const int stage_budget = final_stage ? budget : std::min(budget, 40);
        int before = st.iterations;
        converged = detail::sparsa_stage(prob.op, prob.f, lambda_path[s], stage_tol, stage_budget,
                                         prob.accept_window, st,
                                         final_stage ? &out.objective_trace : nullptr, divergence_cap);
        budget -= st.iterations - before;
        if (budget <= 0 && !final_stage) {
            // Spend whatever is left on the target lambda directly.
            converged = detail::sparsa_stage(prob.op, prob.f, prob.lambda, prob.tol, 1,
                                             prob.accept_window, st, &out.objective_trace,
                                             divergence_cap);
            break;
        }
    }
    out.converged = converged;
    out.iterations = st.iterations;
    out.estimate = std::move(st.x);
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Indices of the k largest nonzero magnitudes, ties broken toward lower
/// index. Exact zeros are never reported as recovered.
inline std::vector<std::int64_t> top_k_support(const Eigen::VectorXcd& v, int k) {
    std::vector<std::int64_t> idx;
    idx.reserve(v.size());
    for (std::int64_t i = 0; i < v.size(); ++i)
        if (v(i) != std::complex<double>{0.0, 0.0}) idx.push_back(i);
    auto take = std::min<std::int64_t>(k, static_cast<std::int64_t>(idx.size()));
    std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                      [&](std::int64_t a, std::int64_t b) {
                          double ma = std::abs(v(a)), mb = std::abs(v(b));
                          return ma > mb || (ma == mb && a < b);
                      });
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// Fraction of the true support missing from the top-k magnitudes.
inline double support_loss(const SparseSignal& truth, const Eigen::VectorXcd& estimate, int k) {
    if (k <= 0 || truth.support.empty()) throw std::invalid_argument("support_loss: empty support");
    auto top = top_k_support(estimate, k);
    std::size_t missed = 0;
    for (auto s : truth.support)
        if (!std::binary_search(top.begin(), top.end(), s)) ++missed;
    return static_cast<double>(missed) / static_cast<double>(truth.support.size());
}

/// Fills the support- and loss-related fields of a solver result.
inline void finalize_recovery(RecoveryResult& res, const SparseSignal& truth, int k) {
    res.recovered_support = top_k_support(res.estimate, k);
    res.zero_one_loss = support_loss(truth, res.estimate, k);
}

}  // namespace dgsense
