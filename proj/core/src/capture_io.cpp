#include "rffid/capture_io.hpp"

#include "rffid/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace rffid {

namespace {

using nlohmann::json;

void put_complex(std::string& out, Complex z)
{
    out += '[';
    out += format_real(z.real());
    out += ',';
    out += format_real(z.imag());
    out += ']';
}

void put_sequence(std::string& out, const ComplexSequence& xs)
{
    out += '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += ',';
        put_complex(out, xs[i]);
    }
    out += ']';
}

Complex get_complex(const json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw IoError("expected [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

ComplexSequence get_sequence(const json& j)
{
    ComplexSequence out;
    out.reserve(j.size());
    for (const auto& z : j)
        out.push_back(get_complex(z));
    return out;
}

} // namespace

std::string format_real(double v)
{
    if (!std::isfinite(v))
        return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string capture_to_json(const AntennaCapture& capture, bool with_truth)
{
    std::string out = "{\"emitter_id\":" + std::to_string(capture.emitter) +
                      ",\"frame_index\":" + std::to_string(capture.frame_index) +
                      ",\"snr_db\":" + format_real(capture.snr_db) +
                      ",\"n_antennas\":" + std::to_string(capture.n_antennas()) +
                      ",\"saturated\":" + std::to_string(capture.saturated) + ",\"samples\":[";
    for (std::size_t i = 0; i < capture.y.size(); ++i) {
        if (i)
            out += ',';
        put_sequence(out, capture.y[i]);
    }
    out += ']';
    if (with_truth && capture.truth) {
        const auto& t = *capture.truth;
        out += ",\"truth\":{\"h\":[";
        for (std::size_t i = 0; i < t.h.size(); ++i) {
            if (i)
                out += ',';
            put_complex(out, t.h[i]);
        }
        out += "],\"theta\":[";
        for (std::size_t i = 0; i < t.theta.size(); ++i) {
            if (i)
                out += ',';
            out += format_real(t.theta[i]);
        }
        out += "],\"noise_variance\":" + format_real(t.noise_variance) + ",\"x_hat\":";
        put_sequence(out, t.x_hat);
        out += '}';
    }
    out += '}';
    return out;
}

AntennaCapture capture_from_json(std::string_view line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed capture record: ") + e.what());
    }
    AntennaCapture cap;
    try {
        cap.emitter = j.at("emitter_id").get<int>();
        cap.frame_index = j.at("frame_index").get<std::uint64_t>();
        const auto& snr = j.at("snr_db");
        cap.snr_db = snr.is_null() ? std::numeric_limits<double>::infinity() : snr.get<double>();
        if (j.contains("saturated"))
            cap.saturated = j["saturated"].get<std::size_t>();
        for (const auto& row : j.at("samples"))
            cap.y.push_back(get_sequence(row));
        if (cap.y.size() != j.at("n_antennas").get<std::size_t>())
            throw IoError("n_antennas does not match the sample rows");
        if (j.contains("truth")) {
            const auto& t = j["truth"];
            CaptureTruth truth;
            for (const auto& h : t.at("h"))
                truth.h.push_back(get_complex(h));
            for (const auto& th : t.at("theta"))
                truth.theta.push_back(th.get<double>());
            truth.noise_variance = t.at("noise_variance").get<double>();
            truth.x_hat = get_sequence(t.at("x_hat"));
            cap.truth = std::move(truth);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("bad capture record: ") + e.what());
    }
    cap.validate();
    return cap;
}

void write_captures(std::ostream& out, const std::vector<AntennaCapture>& captures, bool with_truth)
{
    for (const auto& c : captures)
        out << capture_to_json(c, with_truth) << '\n';
}

void write_captures(const std::filesystem::path& path, const std::vector<AntennaCapture>& captures, bool with_truth)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    write_captures(out, captures, with_truth);
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::vector<AntennaCapture> read_captures(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<AntennaCapture> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(capture_from_json(line));
    return out;
}

} // namespace rffid
