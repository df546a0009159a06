#pragma once

#include "rffid/frontend.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rffid {

/// One JSON object (no trailing newline). Reals use 17 significant digits so
/// a read-back reproduces every sample bit for bit; infinite SNR is `null`.
std::string capture_to_json(const AntennaCapture& capture, bool with_truth = true);
AntennaCapture capture_from_json(std::string_view line);

void write_captures(std::ostream& out, const std::vector<AntennaCapture>& captures, bool with_truth = true);
void write_captures(const std::filesystem::path& path, const std::vector<AntennaCapture>& captures,
                    bool with_truth = true);
std::vector<AntennaCapture> read_captures(const std::filesystem::path& path);

std::string format_real(double v);

} // namespace rffid
