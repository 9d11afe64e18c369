#ifndef FECAP_WAVEFORM_HPP
#define FECAP_WAVEFORM_HPP

#include <vector>

namespace fecap {

// Piecewise-linear applied voltage vs. time.
struct Waveform {
    enum class Kind { ramp, hold };

    struct Segment {
        Kind kind = Kind::hold;
        double v_start = 0.0; // [V]
        double v_end = 0.0;   // [V]
        double duration = 0.0; // [s]
    };

    std::vector<Segment> segments;
    double sample_dt = 1e-6; // recording grid [s]

    double duration() const;
    double value(double t) const; // V at time t (clamped to the ends)

    // Builders keep segments contiguous; they start from the current end
    // voltage (0 V for an empty waveform).
    Waveform& ramp_to(double v, double duration);
    Waveform& hold(double duration);

    // ramp up, flat top of `width`, ramp back to the previous level
    Waveform& pulse(double v, double width, double ramp);

    // Throws std::invalid_argument on non-contiguous segments, non-positive
    // durations, or non-finite voltages.
    void validate() const;
};

} // namespace fecap

#endif
