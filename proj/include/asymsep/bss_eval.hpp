#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asymsep/errors.hpp"

namespace asymsep {

/// BSS-eval scores for one estimated source, in dB, with the decomposition
/// energies retained for audit. Scores are clamped to +/-200 dB so that
/// degenerate cases (zero residual, zero estimate) stay finite.
struct SeparationScores {
    double sdr = 0.0;
    double sir = 0.0;
    double sar = 0.0;
    double target_energy = 0.0;
    double interference_energy = 0.0;
    double artifact_energy = 0.0;
};

namespace detail {

inline constexpr double kScoreClampDb = 200.0;
inline constexpr double kRidge = 1e-10;

inline double ratio_db(double num, double den) {
    if (num <= 0.0) return -kScoreClampDb;
    if (den <= 0.0) return kScoreClampDb;
    return std::clamp(10.0 * std::log10(num / den), -kScoreClampDb, kScoreClampDb);
}

inline double energy(std::span<const double> v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
}

/// In-place lower Cholesky factor of a row-major n x n matrix.
/// Returns false on a non-positive pivot.
inline bool cholesky_factor(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double* rowj = a.data() + j * n;
        double d = rowj[j];
        for (std::size_t k = 0; k < j; ++k) d -= rowj[k] * rowj[k];
        if (!(d > 0.0)) return false;
        const double diag = std::sqrt(d);
        rowj[j] = diag;
        const double inv = 1.0 / diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double* rowi = a.data() + i * n;
            double s = rowi[j];
            for (std::size_t k = 0; k < j; ++k) s -= rowi[k] * rowj[k];
            rowi[j] = s * inv;
        }
    }
    return true;
}

/// Solves L L^T x = b given the factor from cholesky_factor.
inline void cholesky_solve(const std::vector<double>& a, std::size_t n, std::vector<double>& b) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a.data() + i * n;
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= row[k] * b[k];
        b[i] = s / row[i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
        b[ii] = s / a[ii * n + ii];
    }
}

/// Factors g + ridge*I, escalating the ridge if the pivot still fails.
inline void factor_with_ridge(std::vector<double>& g, std::size_t n,
                              const std::function<void(const std::string&)>& warn) {
    for (std::size_t i = 0; i < n; ++i) g[i * n + i] += kRidge;
    std::vector<double> work = g;
    double ridge = kRidge;
    while (!cholesky_factor(work, n)) {
        ridge *= 1e3;
        if (warn)
            warn("projection system singular; escalating ridge to " + std::to_string(ridge));
        else
            std::clog << "asymsep: projection system singular; ridge " << ridge << '\n';
        if (!std::isfinite(ridge)) throw Error("projection system unsolvable");
        work = g;
        for (std::size_t i = 0; i < n; ++i) work[i * n + i] += ridge;
    }
    g.swap(work);
}

/// Cross-correlation r(delta) = sum_m a(m) * b(m + delta) for
/// delta in [-(lags-1), lags-1], stored at index delta + lags - 1.
inline std::vector<double> correlation(std::span<const double> a, std::span<const double> b,
                                       std::size_t lags) {
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    const auto l = static_cast<std::ptrdiff_t>(lags);
    std::vector<double> r(2 * lags - 1, 0.0);
    for (std::ptrdiff_t delta = -(l - 1); delta <= l - 1; ++delta) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -delta);
        const std::ptrdiff_t hi = std::min(n, n - delta);
        double s = 0.0;
        for (std::ptrdiff_t m = lo; m < hi; ++m) s += a[m] * b[m + delta];
        r[static_cast<std::size_t>(delta + l - 1)] = s;
    }
    return r;
}

/// Least-squares projector onto the span of 0..L-1 sample delays of each
/// reference. Shifted references live on a zero-padded axis of length
/// N + L - 1, which makes every Gram block exactly Toeplitz.
class ShiftProjector {
public:
    ShiftProjector(const std::vector<std::vector<double>>& references, std::size_t filter_len,
                   std::function<void(const std::string&)> warn)
        : refs_(references), lags_(filter_len), warn_(std::move(warn)) {
        const std::size_t nref = refs_.size();
        const std::size_t q = nref * lags_;
        n_ = refs_.front().size();
        padded_ = n_ + lags_ - 1;

        std::vector<std::vector<double>> corr(nref * nref);
        for (std::size_t j = 0; j < nref; ++j)
            for (std::size_t k = j; k < nref; ++k)
                corr[j * nref + k] = correlation(refs_[j], refs_[k], lags_);

        // G[jL+a, kL+b] = <s_j delayed a, s_k delayed b> = corr_jk(a - b)
        gram_.assign(q * q, 0.0);
        for (std::size_t j = 0; j < nref; ++j) {
            for (std::size_t k = 0; k < nref; ++k) {
                const bool flip = k < j;
                const std::vector<double>& r = corr[flip ? k * nref + j : j * nref + k];
                for (std::size_t a = 0; a < lags_; ++a) {
                    for (std::size_t b = 0; b < lags_; ++b) {
                        const std::ptrdiff_t delta =
                            static_cast<std::ptrdiff_t>(a) - static_cast<std::ptrdiff_t>(b);
                        const std::ptrdiff_t idx =
                            (flip ? -delta : delta) + static_cast<std::ptrdiff_t>(lags_) - 1;
                        gram_[(j * lags_ + a) * q + (k * lags_ + b)] =
                            r[static_cast<std::size_t>(idx)];
                    }
                }
            }
        }

        // diagonal blocks double as the single-reference target systems
        targets_.resize(nref);
        for (std::size_t j = 0; j < nref; ++j) {
            std::vector<double>& t = targets_[j];
            t.assign(lags_ * lags_, 0.0);
            for (std::size_t a = 0; a < lags_; ++a)
                for (std::size_t b = 0; b < lags_; ++b)
                    t[a * lags_ + b] = gram_[(j * lags_ + a) * q + (j * lags_ + b)];
            factor_with_ridge(t, lags_, warn_);
        }
        factor_with_ridge(gram_, q, warn_);
    }

    std::size_t padded_len() const { return padded_; }

    /// <estimate, s_j delayed tau> for tau = 0..L-1.
    std::vector<double> cross(std::span<const double> estimate, std::size_t j) const {
        std::vector<double> c(lags_, 0.0);
        for (std::size_t tau = 0; tau < lags_; ++tau) {
            double s = 0.0;
            for (std::size_t m = 0; m + tau < n_ && m < n_; ++m)
                s += estimate[m + tau] * refs_[j][m];
            c[tau] = s;
        }
        return c;
    }

    /// Projection onto the delays of reference j only.
    std::vector<double> project_target(std::span<const double> estimate, std::size_t j) const {
        std::vector<double> h = cross(estimate, j);
        cholesky_solve(targets_[j], lags_, h);
        return filter_sum({{j, h}});
    }

    /// Projection onto the delays of all references.
    std::vector<double> project_all(std::span<const double> estimate) const {
        const std::size_t nref = refs_.size();
        const std::size_t q = nref * lags_;
        std::vector<double> rhs(q);
        for (std::size_t j = 0; j < nref; ++j) {
            std::vector<double> c = cross(estimate, j);
            std::copy(c.begin(), c.end(), rhs.begin() + static_cast<std::ptrdiff_t>(j * lags_));
        }
        cholesky_solve(gram_, q, rhs);
        std::vector<std::pair<std::size_t, std::vector<double>>> taps(nref);
        for (std::size_t j = 0; j < nref; ++j) {
            taps[j].first = j;
            taps[j].second.assign(rhs.begin() + static_cast<std::ptrdiff_t>(j * lags_),
                                  rhs.begin() + static_cast<std::ptrdiff_t>((j + 1) * lags_));
        }
        return filter_sum(taps);
    }

private:
    std::vector<double> filter_sum(
        const std::vector<std::pair<std::size_t, std::vector<double>>>& taps) const {
        std::vector<double> out(padded_, 0.0);
        for (const auto& [j, h] : taps) {
            const std::vector<double>& s = refs_[j];
            for (std::size_t tau = 0; tau < lags_; ++tau) {
                const double w = h[tau];
                if (w == 0.0) continue;
                for (std::size_t m = 0; m < n_; ++m) out[m + tau] += w * s[m];
            }
        }
        return out;
    }

    std::vector<std::vector<double>> refs_;
    std::size_t lags_;
    std::function<void(const std::string&)> warn_;
    std::size_t n_ = 0;
    std::size_t padded_ = 0;
    std::vector<double> gram_;
    std::vector<std::vector<double>> targets_;
};

inline void validate_bss_inputs(const std::vector<std::vector<double>>& estimates,
                                const std::vector<std::vector<double>>& references,
                                std::size_t filter_len) {
    if (references.empty()) throw DataError("bss_eval requires at least one reference");
    if (estimates.empty()) throw DataError("bss_eval requires at least one estimate");
    if (estimates.size() > references.size())
        throw DataError("more estimates than references");
    if (filter_len == 0) throw ConfigError("filter_len must be >= 1");
    const std::size_t n = references.front().size();
    if (n == 0) throw DataError("empty signals");
    for (const auto& r : references)
        if (r.size() != n) throw DataError("reference lengths do not match");
    for (const auto& e : estimates)
        if (e.size() != n) throw DataError("estimate length does not match references");
}

inline SeparationScores score_decomposition(std::span<const double> estimate,
                                            const ShiftProjector& proj, std::size_t ref_index) {
    std::vector<double> e_pad(proj.padded_len(), 0.0);
    std::copy(estimate.begin(), estimate.end(), e_pad.begin());

    const std::vector<double> s_target = proj.project_target(estimate, ref_index);
    const std::vector<double> p_all = proj.project_all(estimate);

    const std::size_t p = proj.padded_len();
    std::vector<double> e_interf(p), e_artif(p);
    for (std::size_t i = 0; i < p; ++i) {
        e_interf[i] = p_all[i] - s_target[i];
        e_artif[i] = e_pad[i] - p_all[i];
    }

    SeparationScores sc;
    sc.target_energy = energy(s_target);
    sc.interference_energy = energy(e_interf);
    sc.artifact_energy = energy(e_artif);
    double distortion = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const double d = e_interf[i] + e_artif[i];
        distortion += d * d;
    }
    sc.sdr = ratio_db(sc.target_energy, distortion);
    sc.sir = ratio_db(sc.target_energy, sc.interference_energy);
    sc.sar = ratio_db(energy(p_all), sc.artifact_energy);
    return sc;
}

} // namespace detail

/// BSS-eval decomposition of each estimate against the reference with the
/// same index. Each estimate is split into s_target (projection onto 0..L-1
/// sample delays of the matching reference), e_interf (projection onto all
/// references' delays minus s_target) and e_artif (the residual); then
///   SDR = 10 log10(|s_target|^2 / |e_interf + e_artif|^2)
///   SIR = 10 log10(|s_target|^2 / |e_interf|^2)
///   SAR = 10 log10(|s_target + e_interf|^2 / |e_artif|^2).
/// filter_len defaults to the standard 512 taps.
inline std::vector<SeparationScores> bss_eval(
    const std::vector<std::vector<double>>& estimates,
    const std::vector<std::vector<double>>& references, std::size_t filter_len = 512,
    std::function<void(const std::string&)> warn = {}) {
    detail::validate_bss_inputs(estimates, references, filter_len);
    detail::ShiftProjector proj(references, filter_len, std::move(warn));
    std::vector<SeparationScores> scores;
    scores.reserve(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i)
        scores.push_back(detail::score_decomposition(estimates[i], proj, i));
    return scores;
}

/// bss_eval under the estimate->reference assignment that maximizes mean SDR.
/// permutation[i] is the reference index matched to estimate i.
struct PermutationScores {
    std::vector<std::size_t> permutation;
    std::vector<SeparationScores> scores;
    double mean_sdr = 0.0;
};

inline PermutationScores permute_and_score(const std::vector<std::vector<double>>& estimates,
                                           const std::vector<std::vector<double>>& references,
                                           std::size_t filter_len = 512,
                                           std::function<void(const std::string&)> warn = {}) {
    detail::validate_bss_inputs(estimates, references, filter_len);
    if (estimates.size() != references.size())
        throw DataError("permutation search requires as many estimates as references");
    detail::ShiftProjector proj(references, filter_len, std::move(warn));

    const std::size_t n = estimates.size();
    std::vector<std::vector<SeparationScores>> table(n, std::vector<SeparationScores>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            table[i][j] = detail::score_decomposition(estimates[i], proj, j);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    PermutationScores best;
    best.mean_sdr = -std::numeric_limits<double>::infinity();
    do {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += table[i][perm[i]].sdr;
        mean /= static_cast<double>(n);
        if (mean > best.mean_sdr) {
            best.mean_sdr = mean;
            best.permutation = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    best.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) best.scores[i] = table[i][best.permutation[i]];
    return best;
}

} // namespace asymsep
