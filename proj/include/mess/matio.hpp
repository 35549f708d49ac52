#ifndef MESS_MATIO_HPP
#define MESS_MATIO_HPP

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "mess/basis.hpp"
#include "mess/matrix.hpp"
#include "mess/metrics.hpp"
#include "mess/sampler.hpp"

namespace mess {

/// Snapshot matrix container formats.
///
/// Csv: one text line per matrix row, comma-separated, values printed with
/// 17 significant digits so doubles round-trip exactly.
///
/// MessBin: little-endian binary; 4-byte magic "MESS", uint16 version (1),
/// uint64 rows, uint64 columns, then rows * columns float64 values in
/// column-major order. The payload length must match the header exactly.
///
/// Pgm: binary P5 grayscale, maxval 255; pixel / 255 is the matrix value,
/// image height is the row count and image width the column count.
enum class MatrixFormat { Csv, MessBin, Pgm };

/// Maps .csv / .pgm extensions; anything else (.bin, .messbin, ...) is
/// treated as MessBin.
MatrixFormat format_from_extension(const std::filesystem::path& path);

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format);
void write_matrix(const Matrix& x, const std::filesystem::path& path,
                  MatrixFormat format);

/// Columns j,v,eta,h with one row per trace step; the h cell of the last
/// row is empty since no forward difference exists there.
void write_trace_csv(const EntropyTrace& trace,
                     const std::filesystem::path& path);

/// Pretty-printed JSON with lexicographically ordered keys, so identical
/// records are byte-identical on disk.
void write_report(const nlohmann::json& record,
                  const std::filesystem::path& path);

nlohmann::json sample_report_json(const SampleResult& result);
nlohmann::json error_report_json(const ErrorReport& report);
nlohmann::json basis_report_json(const ReducedBasis& basis);
nlohmann::json horizon_report_json(const HorizonEstimate& est);

} // namespace mess

#endif
