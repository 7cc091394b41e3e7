#ifndef KEYSCAN_BENCHSTATS_HPP
#define KEYSCAN_BENCHSTATS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace keyscan {

enum class KeystoreKind { Software, Tee, StrongBox };
enum class BenchOperation { Keygen, Encrypt, Sign };

std::string to_string(KeystoreKind k);
std::string to_string(BenchOperation o);
KeystoreKind keystore_kind_from_string(const std::string& s);
BenchOperation bench_operation_from_string(const std::string& s);

struct BenchSample {
    std::string device;
    std::optional<int> device_year;
    KeystoreKind keystore_kind = KeystoreKind::Software;
    BenchOperation operation = BenchOperation::Encrypt;
    std::string algorithm;
    std::int64_t payload_bytes = 0;
    int iteration = 0;
    double elapsed_seconds = 0.0;
};

struct BenchGroupKey {
    std::string device;
    KeystoreKind keystore_kind = KeystoreKind::Software;
    BenchOperation operation = BenchOperation::Encrypt;
    std::string algorithm;
    std::int64_t payload_bytes = 0;

    auto operator<=>(const BenchGroupKey&) const = default;
};

struct BenchSummary {
    BenchGroupKey key;
    std::optional<int> device_year;
    std::int64_t n = 0;
    double mean_seconds = 0.0;
    std::optional<double> std_seconds;  // sample std (n-1), absent for n < 2
};

struct DuplicateSample : std::runtime_error {
    explicit DuplicateSample(const std::string& what) : std::runtime_error(what) {}
};
struct BadRow : std::runtime_error {
    BadRow(int line_, const std::string& what)
        : std::runtime_error("bad row at line " + std::to_string(line_) + ": " + what),
          line(line_) {}
    int line;
};

// Header must be exactly:
// device,device_year,keystore_kind,operation,algorithm,payload_bytes,iteration,elapsed_seconds
std::vector<BenchSample> parse_bench_log(const std::filesystem::path& csv);
std::vector<BenchSample> parse_bench_log_text(const std::string& text);

// Per-group mean and sample standard deviation, groups sorted by key.
std::vector<BenchSummary> summarize(const std::vector<BenchSample>& samples);

struct SlowdownRatio {
    BenchGroupKey group;
    KeystoreKind baseline = KeystoreKind::Tee;
    double ratio = 0.0;  // mean(group) / mean(baseline)
};

struct RatioTable {
    std::vector<SlowdownRatio> ratios;
    std::vector<std::string> warnings;  // missing baselines
};

RatioTable slowdown_ratios(const std::vector<BenchSummary>& summaries, KeystoreKind baseline_kind);

// "0.42 ± 0.06" with two decimals; bare mean when std is absent.
std::string render_mean_std(double mean, std::optional<double> std_dev);

// payload_bytes rendered in MiB with trailing zeros trimmed ("1", "0.1").
std::string render_mib(std::int64_t payload_bytes);

struct FigureEmit {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

// Per-kind runtime-vs-payload series CSVs, a runtime-vs-device-year series
// (omitted with a warning when no sample carries a year), and rendered
// mean ± std tables.
FigureEmit emit_figure_data(const std::vector<BenchSummary>& summaries,
                            const std::filesystem::path& out_dir);

}  // namespace keyscan

#endif
