#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string_view>
#include <vector>

#include "roadrough/core/error.hpp"

namespace roadrough::features {

inline constexpr std::size_t kNumExtractors = 34;

/// Extractor names, in output order.
inline constexpr std::array<std::string_view, kNumExtractors> kExtractorNames{
    "mean",           "median",          "min",           "max",
    "variance",       "std",             "mean_abs_dev",  "median_abs_dev",
    "mean_diff",      "median_diff",     "sum_abs_diff",  "iqr",
    "ecdf_p05",       "ecdf_p20",        "ecdf_p80",      "kurtosis",
    "skewness",       "slope",           "autocorr",      "auc",
    "rms",            "abs_energy",      "total_energy",  "centroid",
    "entropy",        "total_distance",  "pos_turning",   "neg_turning",
    "neighbourhood_peaks", "peak_to_peak", "mean_abs_diff", "median_abs_diff",
    "zero_crossings", "zero_mean_abs_area"};

namespace stats {

inline double mean(const std::vector<double>& x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Quantile with linear interpolation between order statistics (q in [0, 1]).
inline double quantile_sorted(const std::vector<double>& s, double q)
{
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline double quantile(std::vector<double> x, double q)
{
    std::sort(x.begin(), x.end());
    return quantile_sorted(x, q);
}

inline double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

/// Smallest sample whose empirical CDF reaches p.
inline double ecdf_value_sorted(const std::vector<double>& s, double p)
{
    const double n = static_cast<double>(s.size());
    auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    k = std::clamp<std::size_t>(k, 1, s.size());
    return s[k - 1];
}

/// Central moment of order r (population).
inline double central_moment(const std::vector<double>& x, double m, int r)
{
    double acc = 0.0;
    for (double v : x) acc += std::pow(v - m, r);
    return acc / static_cast<double>(x.size());
}

inline std::vector<double> diff(const std::vector<double>& x)
{
    std::vector<double> d(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
    return d;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& t)
{
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) a += 0.5 * (t[i + 1] - t[i]) * (x[i] + x[i + 1]);
    return a;
}

} // namespace stats

/// Count of strict local maxima over a +-n sample neighbourhood.
inline double neighbourhood_peaks(const std::vector<double>& x, std::size_t n = 10)
{
    double count = 0;
    for (std::size_t i = n; i + n < x.size(); ++i) {
        bool peak = true;
        for (std::size_t j = i - n; j <= i + n && peak; ++j)
            if (j != i && x[j] >= x[i]) peak = false;
        count += peak ? 1 : 0;
    }
    return count;
}

/// 10-bin equal-width histogram entropy in bits; 0 for a constant channel.
inline double histogram_entropy(const std::vector<double>& x, std::size_t bins = 10)
{
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*hi <= *lo) return 0.0;
    std::vector<double> counts(bins, 0.0);
    const double w = (*hi - *lo) / static_cast<double>(bins);
    for (double v : x) {
        auto b = static_cast<std::size_t>((v - *lo) / w);
        counts[std::min(b, bins - 1)] += 1.0;
    }
    double h = 0.0;
    for (double c : counts)
        if (c > 0) {
            const double p = c / static_cast<double>(x.size());
            h -= p * std::log2(p);
        }
    return h;
}

/// Number of sign changes in `x`; exact zeros carry the previous sign.
inline double sign_changes(const std::vector<double>& x)
{
    double count = 0;
    int last = 0;
    for (double v : x) {
        const int s = (v > 0) - (v < 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

/// The 34 statistical and temporal features of one channel sampled at `t`.
inline std::array<double, kNumExtractors> extract_channel_features(const std::vector<double>& x,
                                                                   const std::vector<double>& t)
{
    detail::require(x.size() >= 3, "extract_channel_features: need at least 3 samples");
    detail::require(t.size() == x.size(), "extract_channel_features: time axis length differs");
    for (std::size_t i = 0; i < x.size(); ++i)
        detail::require(std::isfinite(x[i]) && std::isfinite(t[i]), "extract_channel_features: non-finite input");

    using namespace stats;
    const double n = static_cast<double>(x.size());
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const double m = mean(x);
    const double med = quantile_sorted(sorted, 0.5);
    const double var = central_moment(x, m, 2);
    const double sd = std::sqrt(var);
    const auto d = diff(x);
    std::vector<double> abs_d(d.size());
    std::transform(d.begin(), d.end(), abs_d.begin(), [](double v) { return std::abs(v); });
    std::vector<double> abs_dev(x.size()), abs_dev_med(x.size()), centred(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        abs_dev[i] = std::abs(x[i] - m);
        abs_dev_med[i] = std::abs(x[i] - med);
        centred[i] = x[i] - m;
    }

    // Degenerate spread: shape statistics are reported as 0.
    const bool flat = var <= 1e-300 || sd <= 1e-12 * std::max(1.0, std::abs(m));
    const double kurt = flat ? 0.0 : central_moment(x, m, 4) / (var * var) - 3.0;
    const double skew = flat ? 0.0 : central_moment(x, m, 3) / (var * sd);

    const double tm = mean(t);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (t[i] - tm) * (x[i] - m);
        sxx += (t[i] - tm) * (t[i] - tm);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;

    double ac_num = 0.0, ac_den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ac_den += centred[i] * centred[i];
        if (i + 1 < x.size()) ac_num += centred[i] * centred[i + 1];
    }
    const double autocorr = flat || ac_den <= 0 ? 0.0 : ac_num / ac_den;

    double sq = 0.0, tsq = 0.0, dist = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sq += x[i] * x[i];
        tsq += t[i] * x[i] * x[i];
        if (i > 0) dist += std::hypot(t[i] - t[i - 1], x[i] - x[i - 1]);
    }
    const double duration = t.back() - t.front();

    double pos_turn = 0, neg_turn = 0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (d[i - 1] > 0 && d[i] < 0) ++pos_turn;
        if (d[i - 1] < 0 && d[i] > 0) ++neg_turn;
    }

    std::vector<double> abs_centred(x.size());
    std::transform(centred.begin(), centred.end(), abs_centred.begin(), [](double v) { return std::abs(v); });

    return {m,
            med,
            sorted.front(),
            sorted.back(),
            var,
            sd,
            mean(abs_dev),
            median(abs_dev_med),
            mean(d),
            median(d),
            std::accumulate(abs_d.begin(), abs_d.end(), 0.0),
            quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25),
            ecdf_value_sorted(sorted, 0.05),
            ecdf_value_sorted(sorted, 0.20),
            ecdf_value_sorted(sorted, 0.80),
            kurt,
            skew,
            slope,
            autocorr,
            trapezoid(x, t),
            std::sqrt(sq / n),
            sq,
            duration > 0 ? sq / duration : 0.0,
            sq > 0 ? tsq / sq : 0.0,
            histogram_entropy(x),
            dist,
            pos_turn,
            neg_turn,
            neighbourhood_peaks(x),
            sorted.back() - sorted.front(),
            mean(abs_d),
            median(abs_d),
            sign_changes(centred),
            trapezoid(abs_centred, t)};
}

} // namespace roadrough::features
