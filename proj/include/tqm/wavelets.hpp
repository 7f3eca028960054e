#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "tqm/packets.hpp"

namespace tqm {

struct WaveletAtom {
    double scale;  // s != 0
    double location;
};

// (e^{-it} - e^{-1/2}) e^{-t^2/2}
cplx morlet_mother(double t);
// int dt mother(t) e^{-i w t}
cplx morlet_mother_ft(double w);
// mother((t - l)/s) / sqrt|s|
cplx morlet_atom(const WaveletAtom& a, double t);

struct SampledFunction {
    double t0;
    double dt;
    std::vector<cplx> values;
    double t(std::size_t i) const { return t0 + double(i) * dt; }
};

struct WaveletGridSpec {
    int min_octave = -6;   // smallest |s| = 2^min_octave
    int max_octave = 4;    // largest |s| = 2^max_octave
    int voices = 8;        // per octave
    double margin_scales = 4.0;   // l range: sample support +- margin * max |s|
    double truncation = 8.0;      // atoms cut at |t - l| > truncation * |s|
    double l_step_per_scale = 0.125;  // dl ~ this * |s|, rounded to whole samples
    // low-pass complement: taper 1/2 erfc((|w| - lowpass_cut) / lowpass_edge)
    double lowpass_cut = 0.75;
    double lowpass_edge = 0.08;
    double lowpass_dl = 0.5;
    double lowpass_radius = 160.0;
};

// One row per scale, each with its own uniform l grid.
struct WaveletRow {
    double scale;
    double l0;
    double dl;
    std::vector<cplx> values;
};

struct WaveletCoefficients {
    std::vector<double> s_grid;
    std::vector<WaveletRow> rows;  // parallel to s_grid
    WaveletRow lowpass;            // scale field is 0
    WaveletGridSpec spec;
    SampledFunction shape;         // sample grid of the analysed function (values empty)
    std::size_t sample_count = 0;
};

double admissibility_constant(int panels_per_unit = 8, double cutoff = 40.0);

// Discrete scale sum S(w) = sum_s du |mother_ft(s w)|^2 for a grid spec.
double scale_coverage(const WaveletGridSpec& spec, double w);

WaveletCoefficients forward_transform(const SampledFunction& f, const WaveletGridSpec& spec = {});
SampledFunction inverse_transform(const WaveletCoefficients& c, double C);

double relative_l2_error(const SampledFunction& a, const SampledFunction& b);

// CSV: s,l,re,im; low-pass rows carry s = 0.
std::string coefficients_csv(const WaveletCoefficients& c);

// Ten band-limited reference functions (Gaussians, chirps, two-bump sums) sampled
// on [-20, 20] with dt = 1/512.
struct CorpusEntry {
    std::string name;
    SampledFunction samples;
};
std::vector<CorpusEntry> wavelet_reference_corpus();

struct GaussianTerm {
    AxisPacket packet;  // time axis, evaluated with evaluate_position
    cplx amplitude;
};

std::array<GaussianTerm, 2> gaussian_components(const WaveletAtom& atom, double mass = 1.0);

}  // namespace tqm
