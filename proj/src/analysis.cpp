#include "kerr/analysis.hpp"

#include <cmath>

#include "kerr/error.hpp"

namespace kerr {

std::vector<Window> pulse_windows(const PulseTrain& train, double t_end)
{
    std::vector<Window> out;
    const double half = kWindowHalfWidths * train.width_T;
    for (std::size_t n = 0;; ++n) {
        if (train.count && n >= *train.count) break;
        const double c = train.center(n);
        if (c > t_end) break;
        out.push_back({c - half, c + half});
    }
    return out;
}

Window baseline_window(const PulseTrain& train)
{
    return {0.0, train.t0 - kWindowHalfWidths * train.width_T};
}

std::size_t count_extrema(const std::vector<double>& t, const std::vector<double>& v, Window w,
                          double prominence)
{
    if (t.size() != v.size()) throw DimensionMismatch("time and value series differ in length");
    std::size_t count = 0;
    int dir = 0;
    bool started = false;
    double start = 0.0, ext = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!w.contains(t[i])) continue;
        const double x = v[i];
        if (!started) {
            started = true;
            start = ext = x;
            continue;
        }
        if (dir == 0) {
            if (x >= start + prominence) dir = 1;
            else if (x <= start - prominence) dir = -1;
            if (dir != 0) ext = x;
        } else if (dir > 0) {
            if (x > ext) ext = x;
            else if (ext - x >= prominence) { ++count; dir = -1; ext = x; }
        } else {
            if (x < ext) ext = x;
            else if (x - ext >= prominence) { ++count; dir = 1; ext = x; }
        }
    }
    return count;
}

namespace {

std::optional<double> ratio_at(const ObservableRecord& r)
{
    if (r.mean_n <= 0.0) return std::nullopt;
    return r.variance_n / r.mean_n;
}

double pop(const ObservableRecord& r, std::size_t k)
{
    return k < r.populations.size() ? r.populations[k] : 0.0;
}

} // namespace

SeriesSummary summarize_series(const std::vector<ObservableRecord>& records,
                               const PulseTrain& train)
{
    SeriesSummary s;
    if (records.empty()) return s;
    if (records.front().populations.size() < 3)
        throw InvalidParameter("series summary needs populations up to level 2");

    std::vector<double> t, p1, p2;
    t.reserve(records.size());
    for (const auto& r : records) {
        t.push_back(r.t);
        p1.push_back(pop(r, 1));
        p2.push_back(pop(r, 2));
        if (r.mean_n > s.max_n || &r == &records.front()) {
            s.max_n = r.mean_n;
            s.t_max_n = r.t;
            s.g2_at_max_n = r.g2;
        }
        s.max_p1 = std::max(s.max_p1, pop(r, 1));
        s.max_p2 = std::max(s.max_p2, pop(r, 2));
    }

    const Window base = baseline_window(train);
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& r : records)
        if (base.contains(r.t) && r.g2) { acc += *r.g2; ++n; }
    if (n) s.baseline_g2 = acc / static_cast<double>(n);

    const auto windows = pulse_windows(train, records.back().t);
    for (std::size_t k = 0; k < windows.size(); ++k) {
        PulseSummary ps;
        ps.index = k;
        ps.window = windows[k];
        std::size_t first = records.size(), last = 0, peak = records.size();
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (!ps.window.contains(r.t)) continue;
            first = std::min(first, i);
            last = i;
            if (peak == records.size() || r.mean_n > records[peak].mean_n) peak = i;
            if (r.g2 && (!ps.min_g2 || *r.g2 < *ps.min_g2)) {
                ps.min_g2 = r.g2;
                ps.t_min_g2 = r.t;
                ps.n_at_min_g2 = r.mean_n;
            }
            ps.max_p1 = std::max(ps.max_p1, pop(r, 1));
            ps.max_p2 = std::max(ps.max_p2, pop(r, 2));
        }
        if (peak == records.size()) continue;
        ps.peak_n = records[peak].mean_n;
        ps.t_peak_n = records[peak].t;
        ps.g2_at_peak = records[peak].g2;
        ps.variance_ratio_at_peak = ratio_at(records[peak]);

        for (std::size_t i = first + 1; i < peak && i + 1 <= last; ++i) {
            const auto& a = records[i - 1].g2;
            const auto& b = records[i].g2;
            const auto& c = records[i + 1].g2;
            if (!a || !b || !c || *b < *a || *b < *c) continue;
            if (!ps.front_g2 || *b > *ps.front_g2) {
                ps.front_g2 = b;
                ps.t_front_g2 = records[i].t;
                ps.n_at_front_g2 = records[i].mean_n;
            }
        }
        ps.p1_extrema = count_extrema(t, p1, ps.window);
        ps.p2_extrema = count_extrema(t, p2, ps.window);
        s.pulses.push_back(ps);
    }
    return s;
}

} // namespace kerr
