#include "rffid/emitter.hpp"

#include "rffid/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace rffid {

namespace {

constexpr double pi = std::numbers::pi;

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(std::string_view value, std::string_view key, std::string_view source)
{
    double out = 0.0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw InvalidProfile(std::string(source) + ": key '" + std::string(key) + "' has non-numeric value '" +
                             std::string(value) + "'");
    return out;
}

// Parses "<prefix><index><suffix>" and returns index, or -1.
int indexed_key(std::string_view key, std::string_view prefix, std::string_view suffix)
{
    if (key.size() <= prefix.size() + suffix.size() || !key.starts_with(prefix) || !key.ends_with(suffix))
        return -1;
    const auto digits = key.substr(prefix.size(), key.size() - prefix.size() - suffix.size());
    int idx = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || idx < 1)
        return -1;
    return idx;
}

ComplexSequence dft(const ComplexSequence& x, bool inverse)
{
    const std::size_t n = x.size();
    ComplexSequence out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{};
        for (std::size_t t = 0; t < n; ++t) {
            const auto idx = (k * t) % n;
            const double angle = sign * 2.0 * pi * static_cast<double>(idx) / static_cast<double>(n);
            acc += x[t] * Complex{std::cos(angle), std::sin(angle)};
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

void normalize_energy(ComplexSequence& taps)
{
    double e = 0.0;
    for (const auto& t : taps)
        e += std::norm(t);
    const double scale = 1.0 / std::sqrt(e);
    for (auto& t : taps)
        t *= scale;
}

} // namespace

void EmitterProfile::validate() const
{
    if (!(rho0 > 0.0))
        throw InvalidProfile(name + ": rho0 must be > 0");
    if (!(gain > 0.0))
        throw InvalidProfile(name + ": G must be > 0");
    if (!(std::abs(zeta) < pi / 2))
        throw InvalidProfile(name + ": |zeta| must be < pi/2");
    if (tones.size() != tone_freqs.size())
        throw InvalidProfile(name + ": tone amplitude and frequency lists differ in length");
    if (pa.empty())
        throw InvalidProfile(name + ": PA needs at least the linear coefficient");
    if (!(t_a != 0.0) || !(t_phi != 0.0))
        throw InvalidProfile(name + ": T_A and T_Phi must be non-zero");
}

EmitterProfile EmitterProfile::ideal()
{
    EmitterProfile p;
    p.name = "ideal";
    return p;
}

EmitterProfile parse_profile(std::string_view text, std::string_view source)
{
    EmitterProfile p;
    p.name = std::string(source);
    std::map<int, Complex> tones;
    std::map<int, double> freqs;
    std::map<int, double> pa;

    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw InvalidProfile(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "name") {
            p.name = std::string(value);
            continue;
        }
        const double v = parse_number(value, key, source);

        if (key == "rho0") p.rho0 = v;
        else if (key == "rho1") p.rho1 = v;
        else if (key == "T_A") p.t_a = v;
        else if (key == "q0") p.q0 = v;
        else if (key == "q1") p.q1 = v;
        else if (key == "T_Phi") p.t_phi = v;
        else if (key == "G") p.gain = v;
        else if (key == "zeta_deg") p.zeta = v * pi / 180.0;
        else if (int i = indexed_key(key, "c", "_re"); i > 0) tones[i].real(v);
        else if (int j = indexed_key(key, "c", "_im"); j > 0) tones[j].imag(v);
        else if (int f = indexed_key(key, "f_zeta", ""); f > 0) freqs[f] = v;
        else if (int b = indexed_key(key, "b", ""); b > 0 && b % 2 == 1) pa[(b - 1) / 2] = v;
        else
            throw InvalidProfile(std::string(source) + ":" + std::to_string(line_no) + ": unknown key '" +
                                 std::string(key) + "'");
    }

    int tone_count = 0;
    for (const auto& [i, _] : tones)
        tone_count = std::max(tone_count, i);
    for (const auto& [i, _] : freqs)
        tone_count = std::max(tone_count, i);
    p.tones.assign(static_cast<std::size_t>(tone_count), Complex{});
    p.tone_freqs.assign(static_cast<std::size_t>(tone_count), 0.0);
    for (const auto& [i, c] : tones)
        p.tones[static_cast<std::size_t>(i - 1)] = c;
    for (const auto& [i, f] : freqs)
        p.tone_freqs[static_cast<std::size_t>(i - 1)] = f;

    if (!pa.empty()) {
        p.pa.assign(static_cast<std::size_t>(pa.rbegin()->first + 1), 0.0);
        if (!pa.contains(0))
            p.pa[0] = 1.0;
        for (const auto& [i, b] : pa)
            p.pa[static_cast<std::size_t>(i)] = b;
    }
    p.validate();
    return p;
}

EmitterProfile load_profile(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open emitter profile " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    EmitterProfile p = parse_profile(ss.str(), path.string());
    if (p.name == path.string())
        p.name = path.stem().string();
    return p;
}

std::string format_profile(const EmitterProfile& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "name = " << p.name << '\n'
       << "rho0 = " << p.rho0 << '\n'
       << "rho1 = " << p.rho1 << '\n'
       << "T_A = " << p.t_a << '\n'
       << "q0 = " << p.q0 << '\n'
       << "q1 = " << p.q1 << '\n'
       << "T_Phi = " << p.t_phi << '\n'
       << "G = " << p.gain << '\n'
       << "zeta_deg = " << p.zeta * 180.0 / pi << '\n';
    for (std::size_t i = 0; i < p.tones.size(); ++i) {
        os << 'c' << i + 1 << "_re = " << p.tones[i].real() << '\n'
           << 'c' << i + 1 << "_im = " << p.tones[i].imag() << '\n'
           << "f_zeta" << i + 1 << " = " << p.tone_freqs[i] << '\n';
    }
    for (std::size_t i = 0; i < p.pa.size(); ++i)
        os << 'b' << 2 * i + 1 << " = " << p.pa[i] << '\n';
    return os.str();
}

std::vector<double> rrc_taps(const FilterSpec& spec)
{
    if (spec.span < 4 || spec.oversampling < 2)
        throw InvalidInput("shaping filter needs span >= 4 and oversampling >= 2");
    if (!(spec.rolloff > 0.0 && spec.rolloff <= 1.0))
        throw InvalidInput("rolloff must be in (0, 1]");
    const int len = spec.span * spec.oversampling + 1;
    const int mid = len / 2;
    const double beta = spec.rolloff;
    std::vector<double> h(static_cast<std::size_t>(len));
    for (int n = 0; n < len; ++n) {
        const double t = static_cast<double>(n - mid) / spec.oversampling;
        double v;
        if (t == 0.0) {
            v = 1.0 - beta + 4.0 * beta / pi;
        } else if (std::abs(std::abs(4.0 * beta * t) - 1.0) < 1e-12) {
            v = beta / std::sqrt(2.0) *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
        } else {
            const double num = std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
            const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
            v = num / den;
        }
        h[static_cast<std::size_t>(n)] = v;
    }
    double e = 0.0;
    for (double v : h)
        e += v * v;
    const double scale = 1.0 / std::sqrt(e);
    for (double& v : h)
        v *= scale;
    return h;
}

double amplitude_distortion(const EmitterProfile& p, double f)
{
    return p.rho0 + p.rho1 * std::cos(2.0 * pi * f / p.t_a);
}

double phase_distortion(const EmitterProfile& p, double f)
{
    return 2.0 * pi * p.q0 * f + p.q1 * std::sin(2.0 * pi * f / p.t_phi);
}

ShapingFilter ideal_shaping_filter(const FilterSpec& spec)
{
    const auto h = rrc_taps(spec);
    ShapingFilter out;
    out.taps.assign(h.begin(), h.end());
    out.span = spec.span;
    out.oversampling = spec.oversampling;
    out.rolloff = spec.rolloff;
    return out;
}

ShapingFilter build_shaping_filter(const EmitterProfile& profile, const FilterSpec& spec)
{
    if (!(profile.rho0 > 0.0))
        throw InvalidProfile(profile.name + ": rho0 must be > 0");
    ShapingFilter out = ideal_shaping_filter(spec);

    // Distortion applied on the DFT grid of the tap window; bin k maps to
    // k * oversampling / len cycles per symbol (signed).
    const std::size_t len = out.taps.size();
    ComplexSequence spectrum = dft(out.taps, false);
    for (std::size_t k = 0; k < len; ++k) {
        const double signed_k = k <= len / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(len);
        const double f = signed_k * spec.oversampling / static_cast<double>(len);
        spectrum[k] *= std::polar(amplitude_distortion(profile, f), phase_distortion(profile, f));
    }
    out.taps = dft(spectrum, true);
    normalize_energy(out.taps);
    return out;
}

ComplexSequence shape_symbols(const Frame& frame, const ShapingFilter& filter)
{
    if (frame.oversampling != filter.oversampling)
        throw InvalidInput("frame oversampling " + std::to_string(frame.oversampling) +
                           " does not match filter oversampling " + std::to_string(filter.oversampling));
    const auto os = static_cast<std::ptrdiff_t>(frame.oversampling);
    const auto len = static_cast<std::ptrdiff_t>(frame.sample_count());
    const auto ntaps = static_cast<std::ptrdiff_t>(filter.taps.size());
    const auto mid = static_cast<std::ptrdiff_t>(filter.center());

    ComplexSequence out(static_cast<std::size_t>(len));
    for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(frame.symbols.size()); ++m) {
        const Complex s = frame.symbols[static_cast<std::size_t>(m)];
        if (s == Complex{})
            continue;
        const std::ptrdiff_t origin = m * os - mid;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, origin);
        const std::ptrdiff_t hi = std::min(len, origin + ntaps);
        for (std::ptrdiff_t n = lo; n < hi; ++n)
            out[static_cast<std::size_t>(n)] += s * filter.taps[static_cast<std::size_t>(n - origin)];
    }
    return out;
}

IqCoefficients iq_coefficients(double gain, double zeta)
{
    const double c = std::cos(zeta / 2.0);
    const double s = std::sin(zeta / 2.0);
    return {
        Complex{0.5 * (gain + 1.0) * c, 0.5 * (gain - 1.0) * s},
        Complex{0.5 * (gain - 1.0) * c, 0.5 * (gain + 1.0) * s},
    };
}

ComplexSequence apply_iq_imbalance(std::span<const Complex> s, double gain, double zeta)
{
    if (!(gain > 0.0))
        throw InvalidInput("I/Q gain ratio must be > 0");
    const auto [alpha, beta] = iq_coefficients(gain, zeta);
    ComplexSequence out(s.size());
    for (std::size_t n = 0; n < s.size(); ++n)
        out[n] = alpha * s[n] + beta * std::conj(s[n]);
    return out;
}

ComplexSequence add_spurious_tones(std::span<const Complex> x, std::span<const Complex> c,
                                   std::span<const double> f_zeta, double samples_per_symbol)
{
    if (c.size() != f_zeta.size())
        throw InvalidInput("tone amplitude and frequency lists differ in length");
    ComplexSequence out(x.begin(), x.end());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (f_zeta[i] == 0.0) {
            for (auto& v : out)
                v += c[i];
            continue;
        }
        const double cycles_per_sample = f_zeta[i] / samples_per_symbol;
        for (std::size_t n = 0; n < out.size(); ++n) {
            // Reduce the phase argument before the trig call to keep it exact for rational rates.
            double turns = cycles_per_sample * static_cast<double>(n);
            turns -= std::floor(turns);
            out[n] += c[i] * std::polar(1.0, 2.0 * pi * turns);
        }
    }
    return out;
}

ComplexSequence apply_pa_nonlinearity(std::span<const Complex> x, std::span<const double> b, PaForm form)
{
    if (b.empty())
        throw InvalidInput("PA needs at least one coefficient");
    ComplexSequence out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const Complex v = x[n];
        Complex acc{};
        if (form == PaForm::baseband) {
            const double p = std::norm(v);
            double env = 1.0;
            for (double bi : b) {
                acc += bi * env * v;
                env *= p;
            }
        } else {
            const Complex v2 = v * v;
            Complex term = v;
            for (double bi : b) {
                acc += bi * term;
                term *= v2;
            }
        }
        out[n] = acc;
    }
    return out;
}

ComplexSequence emit(const EmitterProfile& profile, const Frame& frame, const EmitOptions& options)
{
    profile.validate();
    return emit(profile, build_shaping_filter(profile, options.filter), frame, options);
}

ComplexSequence emit(const EmitterProfile& profile, const ShapingFilter& filter, const Frame& frame,
                     const EmitOptions& options)
{
    if (frame.oversampling != filter.oversampling)
        throw InvalidInput("frame oversampling does not match the emitter filter");
    auto s = shape_symbols(frame, filter);
    auto x = apply_iq_imbalance(s, profile.gain, profile.zeta);
    auto x1 = add_spurious_tones(x, profile.tones, profile.tone_freqs, filter.oversampling);
    auto x2 = apply_pa_nonlinearity(x1, profile.pa, options.pa_form);

    const double p = mean_power(x2);
    if (!(p > 0.0))
        throw InvalidInput("emitted frame has zero power");
    const double scale = 1.0 / std::sqrt(p);
    for (auto& v : x2)
        v *= scale;
    return x2;
}

} // namespace rffid
