#pragma once

// Matrix Market "array real general" reader/writer (dense, column-major body).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "error.hpp"
#include "matrix.hpp"

namespace randutv::mm {

namespace detail {

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace detail

inline void write(std::ostream& os, ConstMatrixView a)
{
    os << "%%MatrixMarket matrix array real general\n";
    os << a.rows() << ' ' << a.cols() << '\n';
    char buf[32];
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g\n", a(i, j));
            os.write(buf, len);
        }
    }
}

inline std::string to_string(ConstMatrixView a)
{
    std::ostringstream os;
    write(os, a);
    return os.str();
}

inline Matrix read(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw IoError("matrix market: empty input");

    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
        throw IoError("matrix market: missing %%MatrixMarket banner");
    if (detail::lower(object) != "matrix" || detail::lower(format) != "array" ||
        detail::lower(field) != "real" || detail::lower(symmetry) != "general")
        throw IoError("matrix market: unsupported header '" + line +
                      "' (expected 'matrix array real general')");

    // skip comments and blank lines up to the size line
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%')
            continue;
        break;
    }
    std::istringstream size_line(line);
    long long rows = -1, cols = -1;
    if (!(size_line >> rows >> cols) || rows < 0 || cols < 0)
        throw IoError("matrix market: malformed size line '" + line + "'");

    Matrix a(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            std::string tok;
            if (!(is >> tok))
                throw IoError("matrix market: expected " + std::to_string(rows * cols) +
                              " values, body ended early");
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                throw IoError("matrix market: bad value '" + tok + "'");
            if (!std::isfinite(v))
                throw InputError("matrix market: non-finite value at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
            a(i, j) = v;
        }
    }
    return a;
}

inline Matrix read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    return read(in);
}

inline Matrix from_string(const std::string& text)
{
    std::istringstream is(text);
    return read(is);
}

} // namespace randutv::mm
