#pragma once

#include "rffid/signal.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rffid {

/// Transmit-side hardware distortion parameters of one emitter.
///
/// Filter frequencies (T_A, T_Phi, tone offsets) are in cycles per symbol.
struct EmitterProfile {
    std::string name;
    double rho0 = 1.0;
    double rho1 = 0.0;
    double t_a = 4.0;
    double q0 = 0.0;
    double q1 = 0.0;
    double t_phi = 4.0;
    double gain = 1.0;  // G = G_I / G_Q
    double zeta = 0.0;  // quadrature error, radians
    std::vector<Complex> tones;      // c_i
    std::vector<double> tone_freqs;  // f_zeta,i
    std::vector<double> pa{1.0};     // b_i for odd orders 1, 3, 5, ...

    void validate() const;

    static EmitterProfile ideal();
};

/// Parses the flat `key = value` profile format. Keys: rho0 rho1 T_A q0 q1 T_Phi
/// G zeta_deg c<i>_re c<i>_im f_zeta<i> b<odd>. `#` starts a comment.
EmitterProfile parse_profile(std::string_view text, std::string_view source = "<profile>");
EmitterProfile load_profile(const std::filesystem::path& path);
std::string format_profile(const EmitterProfile& profile);

struct FilterSpec {
    int oversampling = 10;
    int span = 8;
    double rolloff = 0.35;
};

struct ShapingFilter {
    ComplexSequence taps;
    int span = 8;
    int oversampling = 10;
    double rolloff = 0.35;

    std::size_t center() const { return taps.size() / 2; }
};

/// Ideal root-raised-cosine taps (length span*oversampling + 1), unit energy.
std::vector<double> rrc_taps(const FilterSpec& spec);

double amplitude_distortion(const EmitterProfile& profile, double f);
double phase_distortion(const EmitterProfile& profile, double f);

ShapingFilter build_shaping_filter(const EmitterProfile& profile, const FilterSpec& spec);
ShapingFilter ideal_shaping_filter(const FilterSpec& spec);

/// Zero-stuffed symbol train convolved with the taps; output has
/// symbol_count * oversampling samples with the filter delay removed.
ComplexSequence shape_symbols(const Frame& frame, const ShapingFilter& filter);

struct IqCoefficients {
    Complex alpha;
    Complex beta;
};

IqCoefficients iq_coefficients(double gain, double zeta);
ComplexSequence apply_iq_imbalance(std::span<const Complex> s, double gain, double zeta);

/// Adds sum_i c_i exp(j 2 pi f_i n / samples_per_symbol); f_i in cycles per symbol.
ComplexSequence add_spurious_tones(std::span<const Complex> x, std::span<const Complex> c,
                                   std::span<const double> f_zeta, double samples_per_symbol);

enum class PaForm {
    baseband,       // sum_i b_i x |x|^{2i}
    literal_power,  // sum_i b_i x^{2i+1}
};

ComplexSequence apply_pa_nonlinearity(std::span<const Complex> x, std::span<const double> b,
                                      PaForm form = PaForm::baseband);

struct EmitOptions {
    FilterSpec filter;
    PaForm pa_form = PaForm::baseband;
};

/// Full transmit chain (shape, I/Q, tones, PA) scaled to unit mean power.
ComplexSequence emit(const EmitterProfile& profile, const Frame& frame, const EmitOptions& options = {});

/// Same chain with a filter already built by build_shaping_filter.
ComplexSequence emit(const EmitterProfile& profile, const ShapingFilter& filter, const Frame& frame,
                     const EmitOptions& options = {});

} // namespace rffid
