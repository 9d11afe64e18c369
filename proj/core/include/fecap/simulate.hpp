#ifndef FECAP_SIMULATE_HPP
#define FECAP_SIMULATE_HPP

#include "fecap/energy.hpp"
#include "fecap/kinetics.hpp"
#include "fecap/leakage.hpp"
#include "fecap/trace.hpp"
#include "fecap/traps.hpp"
#include "fecap/waveform.hpp"

namespace fecap {

enum class KineticsMode { ensemble, landau_khalatnikov };

// Everything needed to run a virtual device.
struct DeviceModel {
    StackConfig stack;
    EnsembleConfig ensemble;
    TrapParams traps;
    LeakageParams leakage;
    KineticsMode mode = KineticsMode::ensemble;
    double lk_rho = 50.0; // gradient-flow viscosity [V m s / C]

    void validate() const;
};

struct SimState {
    DomainEnsemble ensemble; // unused in landau_khalatnikov mode
    TrapState traps;
    double p = 0.0; // polarization [C/m^2]
    double t = 0.0; // [s]
};

struct SimOptions {
    int steps_per_segment = 1000; // base time grid per waveform segment
    double dp_frac = 0.02;        // sub-step bound, fraction of p_s per step
    double dt_override = 0.0;     // >0: base step [s] instead of the divisor
    int record_every = 1;         // record every k-th base step; 0 = no trace

    SimOptions halved() const; // base step and sub-step bound both halved
};

struct SimResult {
    TraceRecord trace;
    SimState state; // final state
};

// Down-saturated fresh device: all domains unswitched, traps at f_init.
SimState make_initial_state(const DeviceModel& model);

// Coupled time loop: e_app(t) from the waveform through the voltage divider,
// E_dep from the current polarization, E_bias from the trap state; ensemble
// (or gradient-flow) polarization and trap occupancy advance on a shared
// grid with polarization-bounded sub-stepping.
SimResult simulate(const Waveform& waveform, const DeviceModel& model,
                   const SimState& initial, const SimOptions& options = {});

} // namespace fecap

#endif
