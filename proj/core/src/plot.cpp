#include "rffid/plot.hpp"

#include "rffid/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rffid {

namespace {

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::string_view column)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v))
            return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput("column '" + std::string(column) + "' holds non-numeric or infinite value '" + s + "'");
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

} // namespace

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    std::string avail;
    for (const auto& h : header)
        avail += (avail.empty() ? "" : ", ") + h;
    throw InvalidInput("unknown column '" + std::string(name) + "'; available: " + avail);
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto cells = split_row(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw InvalidInput("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty())
        throw InvalidInput("CSV is empty");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::vector<PlotSeries> aggregate_series(const CsvTable& table, std::string_view x, std::string_view y,
                                         std::string_view series)
{
    const auto cx = table.column(x);
    const auto cy = table.column(y);
    const auto cs = table.column(series);
    if (table.rows.empty())
        throw InvalidInput("CSV has no data rows");

    std::vector<std::string> order;
    std::map<std::string, std::map<double, std::pair<double, std::size_t>>> acc;
    for (const auto& row : table.rows) {
        const auto& s = row[cs];
        if (!acc.count(s))
            order.push_back(s);
        auto& cell = acc[s][parse_number(row[cx], x)];
        cell.first += parse_number(row[cy], y);
        ++cell.second;
    }
    std::vector<PlotSeries> out;
    for (const auto& s : order) {
        PlotSeries ps;
        ps.name = s;
        for (const auto& [xv, sum] : acc[s]) {
            ps.x.push_back(xv);
            ps.y.push_back(sum.first / static_cast<double>(sum.second));
            ps.n.push_back(sum.second);
        }
        out.push_back(std::move(ps));
    }
    return out;
}

std::string render_svg(const std::vector<PlotSeries>& series, std::string_view x_label, std::string_view y_label)
{
    if (series.empty())
        throw InvalidInput("nothing to plot");
    const double w = 640, h = 420, left = 70, right = 190, top = 30, bottom = 60;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (x1 == x0) {
        x0 -= 1;
        x1 += 1;
    }
    if (y1 == y0) {
        y0 -= 0.05;
        y1 += 0.05;
    }
    const double pw = w - left - right, ph = h - top - bottom;
    auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    auto sy = [&](double v) { return top + (1.0 - (v - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
          << label(xv) << "</text>\n";
        o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">" << label(yv)
          << "</text>\n";
    }
    o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(h - 15) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
    o << "<text x=\"15\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << num(top + ph / 2) << ")\">" << escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            o << (i ? " " : "") << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
        o << "\"/>\n";
        // One count when every point averages the same number of rows.
        std::string counts;
        if (std::adjacent_find(s.n.begin(), s.n.end(), std::not_equal_to<>()) == s.n.end())
            counts = s.n.empty() ? "0" : std::to_string(s.n.front());
        else
            for (std::size_t i = 0; i < s.n.size(); ++i)
                counts += (i ? "," : "") + std::to_string(s.n[i]);
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << num(w - right + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(w - right + 32)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << num(w - right + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name)
          << " (n=" << counts << ")</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void plot(const std::filesystem::path& results_csv, std::string_view x, std::string_view y, std::string_view series,
          const std::filesystem::path& out_svg)
{
    const auto table = read_csv(results_csv);
    const auto svg = render_svg(aggregate_series(table, x, y, series), x, y);
    std::ofstream out(out_svg, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + out_svg.string() + " for writing");
    out << svg;
    if (!out)
        throw IoError("write failed: " + out_svg.string());
}

} // namespace rffid
