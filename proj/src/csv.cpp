#include "vpmap/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vpmap/errors.hpp"

namespace vpmap {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

} // namespace

Dataset read_data_csv(std::istream& in, Family family, int n2_expected) {
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorCode::data, "data CSV is empty");
    {
        const auto header = split_line(line);
        if (header.size() != 4 || trim(header[0]) != "time" ||
            trim(header[1]) != "area" || trim(header[2]) != "y" ||
            trim(header[3]) != "exposure")
            fail(ErrorCode::data,
                 "data CSV must start with header 'time,area,y,exposure'");
    }
    std::vector<int> time_idx, area_idx;
    std::vector<double> y, exposure;
    int line_no = 1;
    int n1 = 0, n2 = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 4)
            fail(ErrorCode::data, "data CSV line " + std::to_string(line_no) +
                                      ": expected 4 fields");
        try {
            time_idx.push_back(std::stoi(trim(f[0])));
            area_idx.push_back(std::stoi(trim(f[1])));
            y.push_back(std::stod(trim(f[2])));
            exposure.push_back(std::stod(trim(f[3])));
        } catch (const std::exception&) {
            fail(ErrorCode::data, "data CSV line " + std::to_string(line_no) +
                                      ": non-numeric field");
        }
        if (time_idx.back() < 1 || area_idx.back() < 1)
            fail(ErrorCode::data, "data CSV line " + std::to_string(line_no) +
                                      ": indices are 1-based");
        n1 = std::max(n1, time_idx.back());
        n2 = std::max(n2, area_idx.back());
    }
    if (time_idx.empty()) fail(ErrorCode::data, "data CSV lists no observations");
    if (n2_expected > 0) {
        if (n2 > n2_expected)
            fail(ErrorCode::data,
                 "data references area " + std::to_string(n2) +
                     " but the graph has only " + std::to_string(n2_expected));
        n2 = n2_expected;
    }
    try {
        return make_dataset(n1, n2, time_idx, area_idx, y, exposure, family);
    } catch (const VpError& e) {
        fail(ErrorCode::data, e.what());
    }
}

Dataset read_data_csv_file(const std::string& path, Family family,
                           int n2_expected) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open data file: " + path);
    return read_data_csv(in, family, n2_expected);
}

void write_data_csv(std::ostream& out, const Dataset& data) {
    out << "time,area,y,exposure\n";
    for (int j = 0; j < data.n2; ++j)
        for (int i = 0; i < data.n1; ++i) {
            const Eigen::Index cell = static_cast<Eigen::Index>(j) * data.n1 + i;
            if (!data.observed[cell]) continue;
            out << (i + 1) << "," << (j + 1) << ","
                << format_double(data.y(cell)) << ","
                << format_double(data.exposure(cell)) << "\n";
        }
}

} // namespace vpmap
