#pragma once
// Flow rates from tank level time series.
//
// Per sample, Q = [V(h + dt/2 * hdot) - V(h - dt/2 * hdot)] / dt with the
// level rate hdot by central differences (one-sided at the series ends) and
// dt the local sampling step. The reported rate is the mean over the first
// `window` seconds of the series.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "groundbn/errors.hpp"
#include "groundbn/ingest/csv.hpp"

namespace groundbn::ingest {

enum class FlowQuality { good, poor };

inline const char* to_string(FlowQuality q) { return q == FlowQuality::good ? "good" : "poor"; }

// Piecewise-linear level -> volume table, extended linearly past its ends.
class VolumeCurve {
public:
    VolumeCurve(std::vector<double> level, std::vector<double> volume) : h_(std::move(level)), v_(std::move(volume)) {
        if (h_.size() != v_.size() || h_.size() < 2)
            throw Error(ErrorCode::NonMonotoneVolumeCurve, "a volume curve needs at least two (level, volume) points");
        for (std::size_t i = 1; i < h_.size(); ++i) {
            if (!(h_[i] > h_[i - 1]))
                throw Error(ErrorCode::NonMonotoneVolumeCurve, "levels must be strictly increasing",
                            "row " + std::to_string(i + 1));
            if (v_[i] < v_[i - 1])
                throw Error(ErrorCode::NonMonotoneVolumeCurve, "volume decreases with level",
                            "row " + std::to_string(i + 1));
        }
    }

    double operator()(double h) const {
        std::size_t i = static_cast<std::size_t>(std::upper_bound(h_.begin(), h_.end(), h) - h_.begin());
        i = std::clamp<std::size_t>(i, 1, h_.size() - 1);
        const double s = (h - h_[i - 1]) / (h_[i] - h_[i - 1]);
        return v_[i - 1] + s * (v_[i] - v_[i - 1]);
    }

    const std::vector<double>& levels() const { return h_; }
    const std::vector<double>& volumes() const { return v_; }

private:
    std::vector<double> h_, v_;
};

struct LevelSample {
    double time = 0.0;   // s
    double level = 0.0;  // m
};

struct LevelSeries {
    std::string tank;
    std::vector<LevelSample> samples;
    std::function<double(double)> volume;  // level m -> volume m^3, non-decreasing
};

struct FlowEstimate {
    double rate = 0.0;  // m^3/s
    double sd = 0.0;    // sample sd of the per-sample rates in the window
    std::size_t samples = 0;
    FlowQuality quality = FlowQuality::good;
    bool no_measurements = false;
};

inline FlowEstimate flow_rate_from_levels(const LevelSeries& s, double window_s = 60.0,
                                          FlowQuality quality = FlowQuality::good) {
    const auto& x = s.samples;
    if (x.size() < 3)
        throw Error(ErrorCode::InsufficientSamples, "at least three level samples are needed", s.tank);
    if (!s.volume) throw Error(ErrorCode::NonMonotoneVolumeCurve, "no volume curve", s.tank);
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i].time > x[i - 1].time))
            throw Error(ErrorCode::MalformedInput, "sample times must be strictly increasing",
                        s.tank + "[" + std::to_string(i) + "]");
    if (!(window_s > 0.0)) throw Error(ErrorCode::InvalidParameter, "window must be positive");

    const double t_end = x.front().time + window_s;
    std::vector<double> q;
    for (std::size_t i = 0; i < x.size() && x[i].time <= t_end + 1e-9 * window_s; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == x.size() ? i : i + 1;
        const double span = x[b].time - x[a].time;
        const double hdot = (x[b].level - x[a].level) / span;
        const double dt = (b - a == 2) ? 0.5 * span : span;
        const double h = x[i].level, half = 0.5 * dt * hdot;
        const double lo = s.volume(h - half), hi = s.volume(h + half);
        q.push_back((hi - lo) / dt);
    }
    if (q.size() < 3)
        throw Error(ErrorCode::InsufficientSamples, "fewer than three samples fall inside the window", s.tank);

    FlowEstimate out;
    out.samples = q.size();
    out.quality = quality;
    double m = 0.0;
    for (double v : q) m += v;
    m /= static_cast<double>(q.size());
    double ss = 0.0;
    for (double v : q) ss += (v - m) * (v - m);
    out.rate = m;
    out.sd = std::sqrt(ss / static_cast<double>(q.size() - 1));
    return out;
}

// Sum over tanks; the quality is the worst of the inputs. Rates are summed in
// ascending order so the result does not depend on the input order.
inline FlowEstimate sum_tank_flows(std::span<const FlowEstimate> rates) {
    FlowEstimate out;
    if (rates.empty()) {
        out.no_measurements = true;
        return out;
    }
    std::vector<double> r, v;
    for (const auto& f : rates) {
        r.push_back(f.rate);
        v.push_back(f.sd * f.sd);
        out.samples += f.samples;
        if (f.quality == FlowQuality::poor) out.quality = FlowQuality::poor;
    }
    std::sort(r.begin(), r.end());
    std::sort(v.begin(), v.end());
    long double sum = 0.0L, var = 0.0L;
    for (double x : r) sum += x;
    for (double x : v) var += x;
    out.rate = static_cast<double>(sum);
    out.sd = std::sqrt(static_cast<double>(var));
    return out;
}

inline std::vector<LevelSample> read_level_series(const std::string& path) {
    std::vector<LevelSample> out;
    for (const auto& row : numeric_columns(read_csv_file(path), 2, path)) out.push_back({row[0], row[1]});
    return out;
}

inline VolumeCurve read_volume_curve(const std::string& path) {
    std::vector<double> h, v;
    for (const auto& row : numeric_columns(read_csv_file(path), 2, path)) {
        h.push_back(row[0]);
        v.push_back(row[1]);
    }
    return VolumeCurve(std::move(h), std::move(v));
}

}  // namespace groundbn::ingest
