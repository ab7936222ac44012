#pragma once

// Constructive de Finetti mixtures for quadratic Hamiltonians: the embedded
// base measures for Ising/Potts/clock/Heisenberg, the mixing density
// rho(w) ~ mgf(w)^n e^{-|w|^2/2}, exact and Monte Carlo cross-validation,
// and a two-stage sampler.

#include "exchkit/count_distribution.hpp"
#include "exchkit/numeric.hpp"
#include "exchkit/quadrature.hpp"
#include "exchkit/rng.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace exchkit {

enum class ModelKind { Ising, Potts, Clock, Heisenberg };

// nu on R^s: a finite atom list, or the uniform sphere of given radius.
struct BaseMeasure {
    int dim = 1;
    std::vector<std::vector<double>> points;
    std::vector<double> weights;  // normalized
    bool is_sphere = false;
    double radius = 0;

    double dot(const std::vector<double>& w, const std::vector<double>& y) const {
        double acc = 0;
        for (int i = 0; i < dim; ++i) acc += w[i] * y[i];
        return acc;
    }

    double log_mgf(const std::vector<double>& w) const {
        if (is_sphere) {
            double nw = 0;
            for (double x : w) nw += x * x;
            nw = std::sqrt(nw);
            double t = radius * nw;
            if (t < 1e-12) return 0.0;
            if (dim == 3) return std::log(std::sinh(t) / t);
            if (dim == 2) return std::log(std::cyl_bessel_i(0.0, t));
            throw std::domain_error("sphere mgf implemented for dim 2 and 3");
        }
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<double> terms(points.size());
        for (std::size_t t = 0; t < points.size(); ++t) {
            terms[t] = std::log(weights[t]) + dot(w, points[t]);
            mx = std::max(mx, terms[t]);
        }
        double acc = 0;
        for (double v : terms) acc += std::exp(v - mx);
        return mx + std::log(acc);
    }

    // P_w(atom t) = w_t e^{w.y_t} / mgf(w)
    std::vector<double> tilted_probs(const std::vector<double>& w) const {
        double lm = log_mgf(w);
        std::vector<double> p(points.size());
        for (std::size_t t = 0; t < points.size(); ++t)
            p[t] = std::exp(std::log(weights[t]) + dot(w, points[t]) - lm);
        return p;
    }
};

// The Cor 1.3 embeddings. h is per-class for Potts/Clock, {+h, -h} site
// field for Ising (pass {h}), and must be empty for Heisenberg (uniform
// surface density only).
inline BaseMeasure embed_model(ModelKind kind, int q_or_r, double J, const std::vector<double>& h) {
    if (J < 0) throw std::domain_error("embed_model: quadratic representation needs J >= 0");
    const double r = std::sqrt(J);
    BaseMeasure nu;
    auto normalize = [&]() {
        double s = 0;
        for (double w : nu.weights) s += w;
        for (double& w : nu.weights) w /= s;
    };
    switch (kind) {
        case ModelKind::Ising: {
            if (h.size() != 1) throw std::invalid_argument("Ising embedding takes a single field value");
            nu.dim = 1;
            nu.points = {{r}, {-r}};
            nu.weights = {std::exp(h[0]), std::exp(-h[0])};
            normalize();
            return nu;
        }
        case ModelKind::Potts: {
            int q = q_or_r;
            if (q < 2) throw std::invalid_argument("Potts needs q >= 2");
            if (!h.empty() && static_cast<int>(h.size()) != q)
                throw std::invalid_argument("Potts field must have q entries");
            nu.dim = q;
            for (int t = 0; t < q; ++t) {
                std::vector<double> y(q, 0.0);
                y[t] = r;
                nu.points.push_back(y);
                nu.weights.push_back(h.empty() ? 1.0 : std::exp(h[t]));
            }
            normalize();
            return nu;
        }
        case ModelKind::Clock: {
            int q = q_or_r;
            if (q < 2) throw std::invalid_argument("Clock needs q >= 2");
            if (!h.empty() && static_cast<int>(h.size()) != q)
                throw std::invalid_argument("Clock field must have q entries");
            nu.dim = 2;
            for (int t = 0; t < q; ++t) {
                double ang = 2 * M_PI * t / q;
                nu.points.push_back({r * std::cos(ang), r * std::sin(ang)});
                nu.weights.push_back(h.empty() ? 1.0 : std::exp(h[t]));
            }
            normalize();
            return nu;
        }
        case ModelKind::Heisenberg: {
            if (!h.empty()) throw std::invalid_argument("Heisenberg embedding supports the uniform field only");
            nu.dim = q_or_r + 1;
            nu.is_sphere = true;
            nu.radius = r;
            if (nu.dim != 2 && nu.dim != 3) throw std::domain_error("Heisenberg supported for r = 1, 2");
            return nu;
        }
    }
    throw std::logic_error("embed_model: unknown kind");
}

struct MixtureModel {
    BaseMeasure base;
    int n = 0;

    // log rho up to the Z (2 pi)^{s/2} normalization
    double log_rho_unnorm(const std::vector<double>& w) const {
        double nw2 = 0;
        for (double x : w) nw2 += x * x;
        return n * base.log_mgf(w) - 0.5 * nw2;
    }
};

// Exact per-type Gibbs probabilities by enumeration: for type vector kappa,
// P(kappa) ~ multinomial(n; kappa) prod w_t^{kappa_t} e^{|sum kappa_t y_t|^2 / 2}.
struct TypeDistribution {
    std::vector<std::vector<int>> types;
    std::vector<double> prob;
};

inline TypeDistribution gibbs_type_distribution(const BaseMeasure& nu, int n) {
    if (nu.is_sphere) throw std::domain_error("gibbs_type_distribution: finite support required");
    const int q = static_cast<int>(nu.points.size());
    TypeDistribution out;
    std::vector<int> kappa(q, 0);
    std::vector<double> logp;
    std::function<void(int, int)> rec = [&](int t, int left) {
        if (t == q - 1) {
            kappa[t] = left;
            double lmult = std::lgamma(n + 1.0);
            double lw = 0;
            std::vector<double> m(nu.dim, 0.0);
            for (int s = 0; s < q; ++s) {
                lmult -= std::lgamma(kappa[s] + 1.0);
                lw += kappa[s] * std::log(nu.weights[s]);
                for (int d = 0; d < nu.dim; ++d) m[d] += kappa[s] * nu.points[s][d];
            }
            double m2 = 0;
            for (double x : m) m2 += x * x;
            out.types.push_back(kappa);
            logp.push_back(lmult + lw + 0.5 * m2);
            return;
        }
        for (int c = 0; c <= left; ++c) {
            kappa[t] = c;
            rec(t + 1, left - c);
        }
    };
    rec(0, n);
    double mx = *std::max_element(logp.begin(), logp.end());
    double z = 0;
    for (double v : logp) z += std::exp(v - mx);
    for (double v : logp) out.prob.push_back(std::exp(v - mx) / z);
    return out;
}

struct MixtureReport {
    bool exact_branch = false;   // 1-d quadrature vs Monte Carlo
    double max_abs_err = 0;      // quadrature branch
    double max_z = 0;            // IS branch: worst |estimate - exact| / se
    double ess = 0;              // IS effective sample size
    bool inconclusive = false;   // ESS below threshold
    bool pass = false;
};

// Validates mu_{nu,n} = Int P_w^{X n} dF_V(w) against the direct Gibbs
// enumeration: s = 1 by Gauss-Hermite quadrature to `tol`, s >= 2 by
// self-normalized importance sampling with proposal N(0, I) and weight
// mgf(w)^n, within 3 estimated standard errors per type.
inline MixtureReport mixture_check(const MixtureModel& model, double tol = 1e-8, long samples = 200'000,
                                   std::uint64_t seed = 20070867) {
    const BaseMeasure& nu = model.base;
    if (nu.is_sphere) throw std::domain_error("mixture_check: finite support required (sampler covers spheres)");
    auto exact = gibbs_type_distribution(nu, model.n);
    MixtureReport rep;
    const int q = static_cast<int>(nu.points.size());
    if (nu.dim == 1) {
        rep.exact_branch = true;
        // P(kappa) = multinom * prod w^kappa * E_phi e^{w . m(kappa)} / E_phi mgf^n
        const int nodes = 160;
        auto gh = gauss_hermite(nodes);
        auto ephi = [&](const std::function<double(double)>& f) {
            double acc = 0;
            for (int i = 0; i < nodes; ++i) acc += gh.weights[i] * f(std::sqrt(2.0) * gh.nodes[i]);
            return acc / std::sqrt(M_PI);
        };
        double z = ephi([&](double w) { return std::exp(model.n * nu.log_mgf({w})); });
        for (std::size_t t = 0; t < exact.types.size(); ++t) {
            const auto& kappa = exact.types[t];
            double lmult = std::lgamma(model.n + 1.0), lw = 0, m = 0;
            for (int s = 0; s < q; ++s) {
                lmult -= std::lgamma(kappa[s] + 1.0);
                lw += kappa[s] * std::log(nu.weights[s]);
                m += kappa[s] * nu.points[s][0];
            }
            double integral = ephi([&](double w) { return std::exp(w * m); });
            double est = std::exp(lmult + lw) * integral / z;
            rep.max_abs_err = std::max(rep.max_abs_err, std::abs(est - exact.prob[t]));
        }
        rep.pass = rep.max_abs_err <= tol;
        return rep;
    }
    // SNIS branch
    CounterRng rng(seed);
    const std::size_t ntypes = exact.types.size();
    std::vector<double> sum_wf(ntypes, 0.0), sum_w2f(ntypes, 0.0), sum_w2f2(ntypes, 0.0);
    double wsum = 0, w2sum = 0;
    std::vector<double> w(nu.dim);
    for (long i = 0; i < samples; ++i) {
        for (int d = 0; d < nu.dim; ++d) w[d] = rng.normal();
        double wt = std::exp(model.n * nu.log_mgf(w));
        auto p = nu.tilted_probs(w);
        wsum += wt;
        w2sum += wt * wt;
        for (std::size_t t = 0; t < ntypes; ++t) {
            const auto& kappa = exact.types[t];
            double lmult = std::lgamma(model.n + 1.0);
            double f = 1;
            for (int s = 0; s < q; ++s) {
                lmult -= std::lgamma(kappa[s] + 1.0);
                f *= std::pow(p[s], kappa[s]);
            }
            f *= std::exp(lmult);
            sum_wf[t] += wt * f;
            sum_w2f[t] += wt * wt * f;
            sum_w2f2[t] += wt * wt * f * f;
        }
    }
    rep.ess = wsum * wsum / w2sum;
    if (rep.ess < 500) {
        rep.inconclusive = true;
        return rep;
    }
    rep.pass = true;
    for (std::size_t t = 0; t < ntypes; ++t) {
        double est = sum_wf[t] / wsum;
        // delta-method: se^2 = sum w^2 (f - est)^2 / (sum w)^2
        double s2 = sum_w2f2[t] - 2 * est * sum_w2f[t] + est * est * w2sum;
        double se = std::sqrt(std::max(s2, 1e-300)) / wsum;
        double z = std::abs(est - exact.prob[t]) / std::max(se, 1e-12);
        rep.max_z = std::max(rep.max_z, z);
        if (z > 3) rep.pass = false;
    }
    return rep;
}

struct SampleBatch {
    int n = 0;
    // finite support: class index per site; sphere: a point per site
    std::vector<std::vector<int>> classes;
    std::vector<std::vector<std::vector<double>>> points;
    double acceptance_rate = 0;
};

struct EnvelopeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two-stage sampler: w from rho by rejection against a mean-shifted normal
// with covariance 2I (envelope constant from a coarse random search, audited
// at run time), then n i.i.d. draws from P_w.
inline SampleBatch sample_mixture(const MixtureModel& model, long count, std::uint64_t seed) {
    const BaseMeasure& nu = model.base;
    const int s = nu.dim;
    SampleBatch out;
    out.n = model.n;

    // coarse search for the envelope: mode of log rho - log phi_{2I}(. - mu)
    CounterRng search(0xE17C0FFEEull);
    std::vector<double> mu(s, 0.0);
    {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> w(s);
        double reach = 2.0 * model.n * (nu.is_sphere ? nu.radius : 1.0) + 6.0;
        for (const auto& y : nu.points) {
            double ny = 0;
            for (double x : y) ny += x * x;
            reach = std::max(reach, 2.0 * model.n * std::sqrt(ny) + 6.0);
        }
        for (int i = 0; i < 4000; ++i) {
            for (int d = 0; d < s; ++d) w[d] = search.uniform(-reach, reach);
            double v = model.log_rho_unnorm(w);
            if (v > best) {
                best = v;
                mu = w;
            }
        }
        // local refinement
        double step = 0.5;
        while (step > 1e-4) {
            bool improved = false;
            for (int d = 0; d < s; ++d)
                for (double dir : {-1.0, 1.0}) {
                    auto w2 = mu;
                    w2[d] += dir * step;
                    if (model.log_rho_unnorm(w2) > best) {
                        best = model.log_rho_unnorm(w2);
                        mu = w2;
                        improved = true;
                    }
                }
            if (!improved) step /= 2;
        }
    }
    auto log_env = [&](const std::vector<double>& w) {
        double acc = 0;
        for (int d = 0; d < s; ++d) acc += -0.25 * (w[d] - mu[d]) * (w[d] - mu[d]);
        return acc;
    };
    double logK;
    {
        CounterRng probe(0xBEEFCAFEull);
        double worst = -std::numeric_limits<double>::infinity();
        std::vector<double> w(s);
        for (int i = 0; i < 20000; ++i) {
            for (int d = 0; d < s; ++d) w[d] = mu[d] + std::sqrt(2.0) * probe.normal();
            worst = std::max(worst, model.log_rho_unnorm(w) - log_env(w));
        }
        logK = worst + 0.7;  // heuristic headroom; the accept loop audits it
    }

    CounterRng rng(seed);
    long proposals = 0;
    std::vector<double> w(s);
    for (long i = 0; i < count; ++i) {
        // stage 1: w ~ rho
        while (true) {
            ++proposals;
            if (proposals > 1'000'000L + 100 * count)
                throw EnvelopeFailure("sample_mixture: acceptance rate below 1e-6");
            for (int d = 0; d < s; ++d) w[d] = mu[d] + std::sqrt(2.0) * rng.normal();
            double logr = model.log_rho_unnorm(w) - log_env(w) - logK;
            if (logr > 0) {  // envelope breach: lift K, re-evaluate this draw
                logK += logr + 0.1;
                logr = -0.1;
            }
            if (std::log(std::max(rng.uniform(), 1e-300)) < logr) break;
        }
        // stage 2: n i.i.d. sites from P_w
        if (!nu.is_sphere) {
            auto p = nu.tilted_probs(w);
            std::vector<int> row(model.n);
            for (int site = 0; site < model.n; ++site) {
                double u = rng.uniform(), acc = 0;
                int cls = 0;
                for (std::size_t t = 0; t < p.size(); ++t) {
                    acc += p[t];
                    if (u < acc) {
                        cls = static_cast<int>(t);
                        break;
                    }
                    cls = static_cast<int>(t);
                }
                row[site] = cls;
            }
            out.classes.push_back(std::move(row));
        } else {
            // P_w on the sphere ~ e^{w.x}: rejection against the uniform draw
            double nw = 0;
            for (double x : w) nw += x * x;
            nw = std::sqrt(nw);
            std::vector<std::vector<double>> row;
            for (int site = 0; site < model.n; ++site) {
                std::vector<double> x(s);
                while (true) {
                    double nx = 0;
                    for (int d = 0; d < s; ++d) {
                        x[d] = rng.normal();
                        nx += x[d] * x[d];
                    }
                    nx = std::sqrt(nx);
                    for (int d = 0; d < s; ++d) x[d] *= nu.radius / nx;
                    double dotwx = 0;
                    for (int d = 0; d < s; ++d) dotwx += w[d] * x[d];
                    if (std::log(std::max(rng.uniform(), 1e-300)) < dotwx - nw * nu.radius) break;
                }
                row.push_back(x);
            }
            out.points.push_back(std::move(row));
        }
    }
    out.acceptance_rate = double(count) / double(proposals);
    return out;
}

// Binary projection of a finite-support model: classes in `ones` count as 1.
// Used for the fuzzy-Potts FKG check.
inline CountDistribution<double> project_to_binary(const BaseMeasure& nu, int n, const std::vector<int>& ones) {
    auto td = gibbs_type_distribution(nu, n);
    CountDistribution<double> out;
    out.n = n;
    out.pi.assign(n + 1, 0.0);
    for (std::size_t t = 0; t < td.types.size(); ++t) {
        int m = 0;
        for (int cls : ones) m += td.types[t][cls];
        out.pi[m] += td.prob[t];
    }
    return out;
}

}  // namespace exchkit
