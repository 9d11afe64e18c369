#include "fecap/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace fecap {

double Waveform::duration() const {
    double d = 0.0;
    for (const auto& s : segments) d += s.duration;
    return d;
}

double Waveform::value(double t) const {
    if (segments.empty()) return 0.0;
    if (t <= 0.0) return segments.front().v_start;
    double t0 = 0.0;
    for (const auto& s : segments) {
        if (t <= t0 + s.duration) {
            const double frac = (t - t0) / s.duration;
            return s.v_start + (s.v_end - s.v_start) * frac;
        }
        t0 += s.duration;
    }
    return segments.back().v_end;
}

Waveform& Waveform::ramp_to(double v, double dur) {
    const double v0 = segments.empty() ? 0.0 : segments.back().v_end;
    segments.push_back({Kind::ramp, v0, v, dur});
    return *this;
}

Waveform& Waveform::hold(double dur) {
    const double v0 = segments.empty() ? 0.0 : segments.back().v_end;
    segments.push_back({Kind::hold, v0, v0, dur});
    return *this;
}

Waveform& Waveform::pulse(double v, double width, double ramp) {
    const double v0 = segments.empty() ? 0.0 : segments.back().v_end;
    ramp_to(v, ramp);
    hold(width);
    ramp_to(v0, ramp);
    return *this;
}

void Waveform::validate() const {
    if (segments.empty())
        throw std::invalid_argument("waveform: no segments");
    double v_prev = segments.front().v_start;
    for (const auto& s : segments) {
        if (!(s.duration > 0.0))
            throw std::invalid_argument("waveform: segment duration must be > 0");
        if (!std::isfinite(s.v_start) || !std::isfinite(s.v_end))
            throw std::invalid_argument("waveform: non-finite voltage sample");
        if (s.v_start != v_prev)
            throw std::invalid_argument("waveform: segments not contiguous");
        v_prev = s.v_end;
    }
    if (!(sample_dt > 0.0))
        throw std::invalid_argument("waveform: sample_dt must be > 0");
}

} // namespace fecap
