#include "friendsim/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace friendsim {
namespace {

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

struct RawRow {
    std::size_t line = 0;
    std::vector<cplx> entries;
};

struct RawMatrix {
    Dims dims;
    std::size_t n = 0;
    std::vector<RawRow> rows;
    std::size_t last_line = 0;
};

[[noreturn]] void fail(std::string_view source, std::size_t line, std::size_t col, const std::string& what) {
    if (col == 0) {
        throw Error(fmt::format("{}:{}: {}", source, line, what));
    }
    throw Error(fmt::format("{}:{}:{}: {}", source, line, col, what));
}

RawMatrix parse_raw(std::string_view text, std::string_view source) {
    RawMatrix raw;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#') {
            if (eol == text.size()) {
                break;
            }
            continue;
        }
        raw.last_line = line_no;
        if (!have_header) {
            constexpr std::string_view tag = "dims:";
            if (line.substr(first, tag.size()) != tag) {
                fail(source, line_no, first + 1, "expected header \"dims: d1 d2 ...\"");
            }
            std::size_t i = first + tag.size();
            while (i < line.size()) {
                while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
                    ++i;
                }
                if (i >= line.size()) {
                    break;
                }
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
                    ++j;
                }
                std::size_t d = 0;
                const auto tok = line.substr(i, j - i);
                const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
                if (ec != std::errc{} || ptr != tok.data() + tok.size() || d == 0) {
                    fail(source, line_no, i + 1, fmt::format("invalid dimension \"{}\"", tok));
                }
                raw.dims.push_back(d);
                i = j;
            }
            if (raw.dims.empty()) {
                fail(source, line_no, 0, "header lists no dimensions");
            }
            try {
                raw.n = total_dimension(raw.dims);
            } catch (const Error& e) {
                fail(source, line_no, 0, e.what());
            }
            have_header = true;
        } else {
            RawRow row;
            row.line = line_no;
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
                    ++i;
                }
                if (i >= line.size()) {
                    break;
                }
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
                    ++j;
                }
                const auto tok = line.substr(i, j - i);
                const auto z = parse_complex(tok);
                if (!z) {
                    fail(source, line_no, i + 1, fmt::format("non-numeric token \"{}\"", tok));
                }
                row.entries.push_back(*z);
                i = j;
            }
            raw.rows.push_back(std::move(row));
        }
        if (eol == text.size()) {
            break;
        }
    }
    if (!have_header) {
        fail(source, line_no == 0 ? 1 : line_no, 0, "missing \"dims:\" header");
    }
    return raw;
}

std::string dims_str(const Dims& dims) {
    return fmt::format("{}", fmt::join(dims, " "));
}

CMatrix square_body(const RawMatrix& raw, std::string_view source) {
    const std::size_t n = raw.n;
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const auto& row = raw.rows[r];
        if (r >= n) {
            fail(source, row.line, 0,
                 fmt::format("row {} exceeds the {} rows implied by dims {}", r + 1, n, dims_str(raw.dims)));
        }
        if (row.entries.size() != n) {
            fail(source, row.line, 0,
                 fmt::format("row {} has {} entries, expected {}", r + 1, row.entries.size(), n));
        }
    }
    if (raw.rows.size() != n) {
        fail(source, raw.last_line, 0,
             fmt::format("body ends at row {}; dims {} require {} rows", raw.rows.size(), dims_str(raw.dims), n));
    }
    CMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            m(r, c) = raw.rows[r].entries[c];
        }
    }
    return m;
}

}  // namespace

std::optional<cplx> parse_complex(std::string_view tok) {
    if (tok.empty()) {
        return std::nullopt;
    }
    if (tok.back() != 'i') {
        if (auto re = parse_double(tok)) {
            return cplx{*re, 0.0};
        }
        return std::nullopt;
    }
    tok.remove_suffix(1);
    // Split at the last sign that is neither leading nor an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = tok.size(); i-- > 1;) {
        if ((tok[i] == '+' || tok[i] == '-') && tok[i - 1] != 'e' && tok[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string_view::npos) {
        // pure imaginary "2.5i"
        if (auto im = parse_double(tok)) {
            return cplx{0.0, *im};
        }
        return std::nullopt;
    }
    const auto re = parse_double(tok.substr(0, split));
    auto im_tok = tok.substr(split);
    std::optional<double> im;
    if (im_tok == "+" || im_tok == "-") {
        im = im_tok == "+" ? 1.0 : -1.0;
    } else {
        im = parse_double(im_tok);
    }
    if (!re || !im) {
        return std::nullopt;
    }
    return cplx{*re, *im};
}

std::string format_complex(cplx z) {
    return fmt::format("{:.17g}{}{:.17g}i", z.real(), std::signbit(z.imag()) ? "-" : "+", std::abs(z.imag()));
}

std::string format_ket(const Ket& psi) {
    std::string out = fmt::format("dims: {}\n", dims_str(psi.dims()));
    for (std::size_t i = 0; i < psi.size(); ++i) {
        out += (i == 0 ? "" : " ") + format_complex(psi[i]);
    }
    out += '\n';
    return out;
}

std::string format_matrix(const Dims& dims, const CMatrix& m) {
    std::string out = fmt::format("dims: {}\n", dims_str(dims));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out += (c == 0 ? "" : " ") + format_complex(m(r, c));
        }
        out += '\n';
    }
    return out;
}

LoadedState parse_state_text(std::string_view text, std::string_view source) {
    RawMatrix raw = parse_raw(text, source);
    if (raw.rows.empty()) {
        fail(source, raw.last_line, 0, "no body rows after the header");
    }
    if (raw.rows.size() == 1 && raw.n > 1) {
        const auto& row = raw.rows.front();
        if (row.entries.size() != raw.n) {
            fail(source, row.line, 0,
                 fmt::format("ket row has {} entries, expected {}", row.entries.size(), raw.n));
        }
        return Ket(raw.dims, row.entries);
    }
    CMatrix m = square_body(raw, source);
    try {
        return DensityMatrix::checked(raw.dims, std::move(m));
    } catch (const Error& e) {
        throw Error(fmt::format("{}: {}", source, e.what()));
    }
}

Operator parse_operator_text(std::string_view text, std::string_view source) {
    RawMatrix raw = parse_raw(text, source);
    CMatrix m = square_body(raw, source);
    return Operator(raw.dims, std::move(m));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(fmt::format("cannot read file {}", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LoadedState load_matrix_file(const std::filesystem::path& path) {
    return parse_state_text(read_text_file(path), path.string());
}

Operator load_operator_file(const std::filesystem::path& path) {
    return parse_operator_text(read_text_file(path), path.string());
}

}  // namespace friendsim
