#include "keyscan/benchstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "keyscan/util.hpp"

namespace keyscan {

std::string to_string(KeystoreKind k) {
    switch (k) {
        case KeystoreKind::Software: return "software";
        case KeystoreKind::Tee: return "tee";
        case KeystoreKind::StrongBox: return "strongbox";
    }
    return "software";
}

std::string to_string(BenchOperation o) {
    switch (o) {
        case BenchOperation::Keygen: return "keygen";
        case BenchOperation::Encrypt: return "encrypt";
        case BenchOperation::Sign: return "sign";
    }
    return "encrypt";
}

KeystoreKind keystore_kind_from_string(const std::string& s) {
    if (s == "software") return KeystoreKind::Software;
    if (s == "tee") return KeystoreKind::Tee;
    if (s == "strongbox") return KeystoreKind::StrongBox;
    throw std::invalid_argument("unknown keystore_kind: " + s);
}

BenchOperation bench_operation_from_string(const std::string& s) {
    if (s == "keygen") return BenchOperation::Keygen;
    if (s == "encrypt") return BenchOperation::Encrypt;
    if (s == "sign") return BenchOperation::Sign;
    throw std::invalid_argument("unknown operation: " + s);
}

static const char* kHeader =
    "device,device_year,keystore_kind,operation,algorithm,payload_bytes,iteration,"
    "elapsed_seconds";

std::vector<BenchSample> parse_bench_log_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw BadRow(1, "empty log");
    ++lineno;
    if (trim(line) != kHeader)
        throw BadRow(1, std::string("header must be exactly '") + kHeader + "'");

    std::vector<BenchSample> samples;
    std::set<std::tuple<std::string, KeystoreKind, BenchOperation, std::string, std::int64_t, int>>
        seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 8) throw BadRow(lineno, "expected 8 fields");
        BenchSample s;
        try {
            s.device = trim(fields[0]);
            std::string year = trim(fields[1]);
            if (!year.empty()) s.device_year = std::stoi(year);
            s.keystore_kind = keystore_kind_from_string(trim(fields[2]));
            s.operation = bench_operation_from_string(trim(fields[3]));
            s.algorithm = trim(fields[4]);
            s.payload_bytes = std::stoll(trim(fields[5]));
            s.iteration = std::stoi(trim(fields[6]));
            s.elapsed_seconds = std::stod(trim(fields[7]));
        } catch (const std::exception& e) {
            throw BadRow(lineno, e.what());
        }
        if (s.device.empty()) throw BadRow(lineno, "empty device");
        if (s.payload_bytes < 0) throw BadRow(lineno, "negative payload_bytes");
        if (!(s.elapsed_seconds > 0.0)) throw BadRow(lineno, "elapsed_seconds must be positive");
        auto key = std::make_tuple(s.device, s.keystore_kind, s.operation, s.algorithm,
                                   s.payload_bytes, s.iteration);
        if (!seen.insert(key).second)
            throw DuplicateSample("duplicate sample key at line " + std::to_string(lineno));
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<BenchSample> parse_bench_log(const std::filesystem::path& csv) {
    return parse_bench_log_text(read_file(csv));
}

std::vector<BenchSummary> summarize(const std::vector<BenchSample>& samples) {
    std::map<BenchGroupKey, std::vector<const BenchSample*>> groups;
    for (const auto& s : samples)
        groups[{s.device, s.keystore_kind, s.operation, s.algorithm, s.payload_bytes}].push_back(
            &s);

    std::vector<BenchSummary> out;
    for (const auto& [key, members] : groups) {
        BenchSummary summary;
        summary.key = key;
        summary.n = static_cast<std::int64_t>(members.size());
        // Welford's online update
        double mean = 0.0, m2 = 0.0;
        std::int64_t count = 0;
        for (const auto* s : members) {
            ++count;
            double delta = s->elapsed_seconds - mean;
            mean += delta / static_cast<double>(count);
            m2 += delta * (s->elapsed_seconds - mean);
            if (s->device_year && !summary.device_year) summary.device_year = s->device_year;
        }
        summary.mean_seconds = mean;
        if (count >= 2) summary.std_seconds = std::sqrt(m2 / static_cast<double>(count - 1));
        out.push_back(std::move(summary));
    }
    return out;  // map iteration order == key order
}

RatioTable slowdown_ratios(const std::vector<BenchSummary>& summaries,
                           KeystoreKind baseline_kind) {
    RatioTable out;
    std::map<BenchGroupKey, double> baseline_means;
    for (const auto& s : summaries) {
        if (s.key.keystore_kind != baseline_kind) continue;
        baseline_means[s.key] = s.mean_seconds;
    }
    for (const auto& s : summaries) {
        BenchGroupKey base_key = s.key;
        base_key.keystore_kind = baseline_kind;
        auto it = baseline_means.find(base_key);
        if (it == baseline_means.end()) {
            if (s.key.keystore_kind != baseline_kind)
                out.warnings.push_back("no " + to_string(baseline_kind) + " baseline for " +
                                       s.key.device + "/" + to_string(s.key.operation) + "/" +
                                       s.key.algorithm + "/" +
                                       std::to_string(s.key.payload_bytes));
            continue;
        }
        out.ratios.push_back({s.key, baseline_kind, s.mean_seconds / it->second});
    }
    return out;
}

std::string render_mean_std(double mean, std::optional<double> std_dev) {
    std::string out = format_fixed(mean, 2);
    if (std_dev) out += " ± " + format_fixed(*std_dev, 2);
    return out;
}

std::string render_mib(std::int64_t payload_bytes) {
    double mib = static_cast<double>(payload_bytes) / (1024.0 * 1024.0);
    double rounded = std::round(mib);
    if (std::abs(mib - rounded) < 1e-9)
        return std::to_string(static_cast<std::int64_t>(rounded));
    std::string s = format_fixed(mib, 4);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

FigureEmit emit_figure_data(const std::vector<BenchSummary>& summaries,
                            const std::filesystem::path& out_dir) {
    FigureEmit out;
    std::filesystem::create_directories(out_dir);

    // raw values per keystore kind; plotting applies any axis scaling
    std::set<KeystoreKind> kinds;
    for (const auto& s : summaries) kinds.insert(s.key.keystore_kind);
    for (KeystoreKind kind : kinds) {
        std::ostringstream csv;
        csv << "device,operation,algorithm,payload_bytes,n,mean_seconds,std_seconds\n";
        for (const auto& s : summaries) {
            if (s.key.keystore_kind != kind) continue;
            csv << s.key.device << "," << to_string(s.key.operation) << "," << s.key.algorithm
                << "," << s.key.payload_bytes << "," << s.n << "," << format_fixed(s.mean_seconds, 6)
                << "," << (s.std_seconds ? format_fixed(*s.std_seconds, 6) : "") << "\n";
        }
        auto path = out_dir / ("payload_series_" + to_string(kind) + ".csv");
        write_file_atomic(path, csv.str());
        out.files.push_back(path);
    }

    bool any_year = std::any_of(summaries.begin(), summaries.end(),
                                [](const BenchSummary& s) { return s.device_year.has_value(); });
    if (any_year) {
        std::ostringstream csv;
        csv << "device_year,device,keystore_kind,operation,algorithm,payload_bytes,mean_seconds,"
               "std_seconds\n";
        std::vector<const BenchSummary*> rows;
        for (const auto& s : summaries)
            if (s.device_year) rows.push_back(&s);
        std::sort(rows.begin(), rows.end(), [](const BenchSummary* a, const BenchSummary* b) {
            return std::tie(*a->device_year, a->key) < std::tie(*b->device_year, b->key);
        });
        for (const auto* s : rows) {
            csv << *s->device_year << "," << s->key.device << "," << to_string(s->key.keystore_kind)
                << "," << to_string(s->key.operation) << "," << s->key.algorithm << ","
                << s->key.payload_bytes << "," << format_fixed(s->mean_seconds, 6) << ","
                << (s->std_seconds ? format_fixed(*s->std_seconds, 6) : "") << "\n";
        }
        auto path = out_dir / "evolution_series.csv";
        write_file_atomic(path, csv.str());
        out.files.push_back(path);
    } else {
        out.warnings.push_back("device_year absent for all rows, evolution series omitted");
    }

    // rendered mean ± std tables per (device, operation, algorithm), one row
    // per payload size, one column per keystore kind
    std::map<std::tuple<std::string, BenchOperation, std::string>,
             std::map<std::int64_t, std::map<KeystoreKind, const BenchSummary*>>>
        tables;
    for (const auto& s : summaries)
        tables[{s.key.device, s.key.operation, s.key.algorithm}][s.key.payload_bytes]
              [s.key.keystore_kind] = &s;
    std::ostringstream rendered;
    for (const auto& [scope, rows] : tables) {
        const auto& [device, operation, algorithm] = scope;
        std::set<KeystoreKind> cols;
        for (const auto& [payload, by_kind] : rows)
            for (const auto& [kind, _] : by_kind) cols.insert(kind);
        rendered << "# " << device << " " << to_string(operation) << " " << algorithm << "\n";
        rendered << "size_mib";
        for (KeystoreKind kind : cols) rendered << " | " << to_string(kind);
        rendered << "\n";
        for (const auto& [payload, by_kind] : rows) {
            rendered << render_mib(payload);
            for (KeystoreKind kind : cols) {
                auto it = by_kind.find(kind);
                rendered << " | "
                         << (it == by_kind.end()
                                 ? std::string("-")
                                 : render_mean_std(it->second->mean_seconds,
                                                   it->second->std_seconds));
            }
            rendered << "\n";
        }
        rendered << "\n";
    }
    auto rendered_path = out_dir / "rendered_tables.txt";
    write_file_atomic(rendered_path, rendered.str());
    out.files.push_back(rendered_path);
    return out;
}

}  // namespace keyscan
