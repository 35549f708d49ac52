#include "mess/matio.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mess/errors.hpp"

namespace mess {

namespace {

constexpr std::size_t kHeaderSize = 22; // magic + version + rows + cols
constexpr std::uint16_t kVersion = 1;

[[noreturn]] void cannot_open(const std::filesystem::path& path, const char* mode) {
    std::ostringstream msg;
    msg << "cannot open '" << path.string() << "' for " << mode;
    throw IoError(msg.str());
}

[[noreturn]] void write_failed(const std::filesystem::path& path) {
    std::ostringstream msg;
    msg << "write to '" << path.string() << "' failed";
    throw IoError(msg.str());
}

std::uint16_t get_u16le(const unsigned char* p) noexcept {
    return static_cast<std::uint16_t>(p[0] | (std::uint16_t(p[1]) << 8));
}

std::uint64_t get_u64le(const unsigned char* p) noexcept {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

double get_f64le(const unsigned char* p) noexcept {
    return std::bit_cast<double>(get_u64le(p));
}

void put_u16le(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

std::uintmax_t file_size_of(const std::filesystem::path& path) {
    std::error_code ec;
    const std::uintmax_t size = std::filesystem::file_size(path, ec);
    if (ec) cannot_open(path, "reading");
    return size;
}

Matrix read_messbin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) cannot_open(path, "reading");
    const std::uintmax_t fsize = file_size_of(path);

    unsigned char header[kHeaderSize];
    in.read(reinterpret_cast<char*>(header), kHeaderSize);
    if (static_cast<std::size_t>(in.gcount()) != kHeaderSize) {
        std::ostringstream msg;
        msg << "file ends at byte " << in.gcount() << "; a " << kHeaderSize
            << "-byte header is required";
        throw FormatError(msg.str());
    }
    if (std::memcmp(header, "MESS", 4) != 0) {
        throw FormatError("bad magic at byte 0; not a MessBin file");
    }
    const std::uint16_t version = get_u16le(header + 4);
    if (version != kVersion) {
        std::ostringstream msg;
        msg << "unsupported version " << version << " at byte 4";
        throw FormatError(msg.str());
    }
    const std::uint64_t m = get_u64le(header + 6);
    const std::uint64_t n = get_u64le(header + 14);
    if (m == 0 || n == 0) {
        throw FormatError("zero dimension in header (bytes 6..21)");
    }
    if (n != 0 && m > std::numeric_limits<std::uint64_t>::max() / 8 / n) {
        std::ostringstream msg;
        msg << "declared size " << m << " x " << n << " is implausibly large";
        throw FormatError(msg.str());
    }
    const std::uint64_t expected = kHeaderSize + 8 * m * n;
    if (fsize < expected) {
        std::ostringstream msg;
        msg << "file ends at byte " << fsize << "; header declares " << m
            << " x " << n << " values requiring " << expected << " bytes";
        throw FormatError(msg.str());
    }
    if (fsize > expected) {
        std::ostringstream msg;
        msg << (fsize - expected) << " trailing bytes at byte " << expected;
        throw FormatError(msg.str());
    }

    Matrix x(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    double* dst = x.storage().data();
    const std::uint64_t count = m * n;
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(dst),
                static_cast<std::streamsize>(8 * count));
        if (static_cast<std::uint64_t>(in.gcount()) != 8 * count) {
            throw FormatError("payload read stopped short of the declared size");
        }
    } else {
        std::vector<unsigned char> buf(8 * 8192);
        std::uint64_t done = 0;
        while (done < count) {
            const std::uint64_t batch = std::min<std::uint64_t>(8192, count - done);
            in.read(reinterpret_cast<char*>(buf.data()),
                    static_cast<std::streamsize>(8 * batch));
            if (static_cast<std::uint64_t>(in.gcount()) != 8 * batch) {
                throw FormatError("payload read stopped short of the declared size");
            }
            for (std::uint64_t i = 0; i < batch; ++i) {
                dst[done + i] = get_f64le(buf.data() + 8 * i);
            }
            done += batch;
        }
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!std::isfinite(dst[i])) {
            std::ostringstream msg;
            msg << "non-finite value at byte " << (kHeaderSize + 8 * i)
                << " (row " << i % m << ", column " << i / m << ")";
            throw ValidationError(msg.str());
        }
    }
    return x;
}

void write_messbin(const Matrix& x, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) cannot_open(path, "writing");
    std::string header = "MESS";
    put_u16le(header, kVersion);
    put_u64le(header, x.rows());
    put_u64le(header, x.cols());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    const double* src = x.storage().data();
    const std::size_t count = x.size();
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(src),
                  static_cast<std::streamsize>(8 * count));
    } else {
        std::string buf;
        buf.reserve(8 * 8192);
        for (std::size_t i = 0; i < count; ++i) {
            put_u64le(buf, std::bit_cast<std::uint64_t>(src[i]));
            if (buf.size() == 8 * 8192) {
                out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
                buf.clear();
            }
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    out.flush();
    if (!out) write_failed(path);
}

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

Matrix read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) cannot_open(path, "reading");

    std::vector<std::vector<double>> rows;
    std::size_t n_cols = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            if (in.peek() == std::char_traits<char>::eof()) break;
            std::ostringstream msg;
            msg << "empty line " << line_no;
            throw FormatError(msg.str());
        }
        std::vector<double> row;
        std::string_view rest = line;
        std::size_t field_no = 0;
        while (true) {
            ++field_no;
            const std::size_t comma = rest.find(',');
            const std::string_view raw =
                comma == std::string_view::npos ? rest : rest.substr(0, comma);
            const std::string_view field = trim(raw);
            double value = 0.0;
            const auto [ptr, ec] =
                std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc{} || ptr != field.data() + field.size() ||
                field.empty()) {
                std::ostringstream msg;
                msg << "cannot parse number in line " << line_no << ", field "
                    << field_no;
                throw FormatError(msg.str());
            }
            if (!std::isfinite(value)) {
                std::ostringstream msg;
                msg << "non-finite value in line " << line_no << ", field "
                    << field_no;
                throw ValidationError(msg.str());
            }
            row.push_back(value);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (n_cols == 0) {
            n_cols = row.size();
        } else if (row.size() != n_cols) {
            std::ostringstream msg;
            msg << "line " << line_no << " has " << row.size()
                << " fields, expected " << n_cols;
            throw FormatError(msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw FormatError("no data rows");
    }
    Matrix x(rows.size(), n_cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            x(i, j) = rows[i][j];
        }
    }
    return x;
}

void append_g17(std::string& out, double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(len));
}

void write_csv(const Matrix& x, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) cannot_open(path, "writing");
    std::string line;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (j > 0) line.push_back(',');
            append_g17(line, x(i, j));
        }
        line.push_back('\n');
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    out.flush();
    if (!out) write_failed(path);
}

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(const std::vector<unsigned char>& bytes)
        : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }

    // Reads the next decimal token, skipping whitespace and '#' comments.
    std::uint64_t next_number(const char* what) {
        skip_separators();
        if (pos_ >= bytes_.size() || !is_digit(bytes_[pos_])) {
            std::ostringstream msg;
            msg << "expected " << what << " at byte " << pos_;
            throw FormatError(msg.str());
        }
        std::uint64_t value = 0;
        while (pos_ < bytes_.size() && is_digit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (std::uint64_t{1} << 40)) {
                std::ostringstream msg;
                msg << what << " at byte " << pos_ << " is implausibly large";
                throw FormatError(msg.str());
            }
            ++pos_;
        }
        return value;
    }

    // Consumes the single whitespace byte separating the header from the
    // pixel payload.
    void finish_header() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            std::ostringstream msg;
            msg << "expected whitespace before pixel data at byte " << pos_;
            throw FormatError(msg.str());
        }
        ++pos_;
    }

private:
    static bool is_digit(unsigned char c) noexcept { return c >= '0' && c <= '9'; }
    static bool is_space(unsigned char c) noexcept {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
               c == '\v';
    }

    void skip_separators() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 2; // past the "P5" magic
};

Matrix read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) cannot_open(path, "reading");
    std::vector<unsigned char> bytes(
        (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw FormatError("bad magic at byte 0; not a binary P5 file");
    }
    PgmHeaderReader header(bytes);
    const std::uint64_t width = header.next_number("width");
    const std::uint64_t height = header.next_number("height");
    const std::size_t maxval_at = header.offset();
    const std::uint64_t maxval = header.next_number("maxval");
    if (width == 0 || height == 0) {
        throw FormatError("zero image dimension in header");
    }
    if (maxval != 255) {
        std::ostringstream msg;
        msg << "maxval must be 255, got " << maxval << " at byte " << maxval_at;
        throw FormatError(msg.str());
    }
    header.finish_header();

    const std::size_t start = header.offset();
    const std::uint64_t expected = width * height;
    const std::uint64_t available = bytes.size() - start;
    if (available < expected) {
        std::ostringstream msg;
        msg << "file ends at byte " << bytes.size() << "; " << expected
            << " pixel bytes were declared from byte " << start;
        throw FormatError(msg.str());
    }
    if (available > expected) {
        std::ostringstream msg;
        msg << (available - expected) << " trailing bytes at byte "
            << (start + expected);
        throw FormatError(msg.str());
    }

    Matrix x(static_cast<std::size_t>(height), static_cast<std::size_t>(width));
    for (std::uint64_t i = 0; i < height; ++i) {
        for (std::uint64_t j = 0; j < width; ++j) {
            x(i, j) = static_cast<double>(bytes[start + i * width + j]) / 255.0;
        }
    }
    return x;
}

void write_pgm(const Matrix& x, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) cannot_open(path, "writing");
    std::string header = "P5\n";
    header += std::to_string(x.cols());
    header += ' ';
    header += std::to_string(x.rows());
    header += "\n255\n";
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    std::string payload;
    payload.reserve(x.size());
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double v = x(i, j);
            if (v < 0.0 || v > 1.0) {
                ++clamped;
                v = v < 0.0 ? 0.0 : 1.0;
            }
            payload.push_back(
                static_cast<char>(static_cast<unsigned char>(
                    std::lround(v * 255.0))));
        }
    }
    if (clamped > 0) {
        std::cerr << "pgm write: clamped " << clamped
                  << " out-of-range values into [0, 1]\n";
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.flush();
    if (!out) write_failed(path);
}

} // namespace

MatrixFormat format_from_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == ".csv") return MatrixFormat::Csv;
    if (ext == ".pgm") return MatrixFormat::Pgm;
    return MatrixFormat::MessBin;
}

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format) {
    switch (format) {
    case MatrixFormat::Csv:
        return read_csv(path);
    case MatrixFormat::Pgm:
        return read_pgm(path);
    case MatrixFormat::MessBin:
    default:
        return read_messbin(path);
    }
}

void write_matrix(const Matrix& x, const std::filesystem::path& path,
                  MatrixFormat format) {
    validate_snapshot_matrix(x);
    switch (format) {
    case MatrixFormat::Csv:
        write_csv(x, path);
        return;
    case MatrixFormat::Pgm:
        write_pgm(x, path);
        return;
    case MatrixFormat::MessBin:
    default:
        write_messbin(x, path);
        return;
    }
}

void write_trace_csv(const EntropyTrace& trace,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) cannot_open(path, "writing");
    std::string line = "j,v,eta,h\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    for (std::size_t j = 0; j < trace.steps(); ++j) {
        line = std::to_string(j + 1);
        line.push_back(',');
        append_g17(line, trace.v[j]);
        line.push_back(',');
        append_g17(line, trace.eta[j]);
        line.push_back(',');
        if (j + 1 < trace.steps()) append_g17(line, trace.h[j]);
        line.push_back('\n');
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    out.flush();
    if (!out) write_failed(path);
}

void write_report(const nlohmann::json& record,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) cannot_open(path, "writing");
    out << record.dump(2) << '\n';
    out.flush();
    if (!out) write_failed(path);
}

nlohmann::json sample_report_json(const SampleResult& result) {
    nlohmann::json j;
    j["epsilon_abs"] = result.epsilon_abs;
    j["n_seen"] = result.n_seen;
    j["n_selected"] = result.selected.size();
    j["selected"] = result.selected;
    if (result.stop_index) {
        j["stop_index"] = *result.stop_index;
    } else {
        j["stop_index"] = nullptr;
    }
    j["trace_is_surrogate"] = result.trace_is_surrogate;
    if (!result.trace.v.empty()) {
        j["final_potential"] = result.trace.v.back();
        j["final_entropy"] = result.trace.eta.back();
    }
    return j;
}

nlohmann::json error_report_json(const ErrorReport& report) {
    nlohmann::json j;
    j["eps_abs"] = report.eps_abs;
    j["max_abs_error"] = report.max_abs;
    j["max_rel_error"] = report.max_rel;
    j["n_snapshots"] = report.per_snapshot.size();
    return j;
}

nlohmann::json basis_report_json(const ReducedBasis& basis) {
    nlohmann::json j;
    j["m"] = basis.m;
    j["ell"] = basis.ell;
    j["provenance"] =
        basis.provenance == BasisProvenance::MessQr ? "mess-qr" : "pod";
    j["numerical_rank_tol"] = basis.numerical_rank_tol;
    j["dropped_columns"] = basis.dropped_columns;
    return j;
}

nlohmann::json horizon_report_json(const HorizonEstimate& est) {
    nlohmann::json j;
    j["j_star"] = est.j_star;
    j["v_star"] = est.v_star;
    j["unbounded"] = est.unbounded;
    j["i_max"] = est.i_max;
    j["no_guaranteed_horizon"] = est.no_guaranteed_horizon;
    return j;
}

} // namespace mess
