#ifndef KEYSCAN_LABELS_HPP
#define KEYSCAN_LABELS_HPP

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace keyscan {

// Play Store data-safety category table: 14 data types, two of which do not
// count toward sensitivity. Shipped as data so the canonical strings stay
// editable; see data/data_safety_categories.json.
struct CategoryTable {
    std::vector<std::string> categories;
    std::set<std::string> excluded;  // not user-provided data

    static CategoryTable builtin_default();
    static CategoryTable from_file(const std::filesystem::path& path);

    bool known(const std::string& category) const;
    std::string to_json_text() const;
};

struct DataSafetyLabel {
    std::string app_id;
    bool submitted = false;
    std::set<std::string> collected;
    std::set<std::string> shared;
};

enum class SensitivityClass { Sensitive, Benign, NoLabel };

std::string to_string(SensitivityClass c);

struct MalformedRecord : std::runtime_error {
    MalformedRecord(int line_, const std::string& what)
        : std::runtime_error("malformed label record at line " + std::to_string(line_) + ": " +
                             what),
          line(line_) {}
    int line;
};

struct LabelIngest {
    std::vector<DataSafetyLabel> labels;
    std::vector<std::string> warnings;
};

// JSONL, one label per line: {app_id, submitted, collected: [...], shared:
// [...]}. Unknown category strings are dropped with a warning; the record is
// retained.
LabelIngest ingest_labels(const std::filesystem::path& path,
                          const CategoryTable& table = CategoryTable::builtin_default());
LabelIngest ingest_labels_text(const std::string& text,
                               const CategoryTable& table = CategoryTable::builtin_default());

// Sensitive iff any collected category outside the two excluded ones.
SensitivityClass classify_sensitivity(const DataSafetyLabel& label,
                                      const CategoryTable& table = CategoryTable::builtin_default());

}  // namespace keyscan

#endif
