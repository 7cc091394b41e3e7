#include "keyscan/labels.hpp"

#include <sstream>

#include "json.hpp"
#include "keyscan/util.hpp"

namespace keyscan {

using nlohmann::json;

std::string to_string(SensitivityClass c) {
    switch (c) {
        case SensitivityClass::Sensitive: return "sensitive";
        case SensitivityClass::Benign: return "benign";
        case SensitivityClass::NoLabel: return "no-label";
    }
    return "no-label";
}

CategoryTable CategoryTable::builtin_default() {
    // Category names as rendered in the Play Console data safety form.
    // Verify against current Play documentation before trusting new strings.
    CategoryTable t;
    t.categories = {
        "Location",        "Personal info",  "Financial info",
        "Health and fitness", "Messages",    "Photos and videos",
        "Audio files",     "Files and docs", "Calendar",
        "Contacts",        "App activity",   "Web browsing",
        "App info and performance", "Device or other IDs",
    };
    t.excluded = {"App info and performance", "Device or other IDs"};
    return t;
}

CategoryTable CategoryTable::from_file(const std::filesystem::path& path) {
    json doc = json::parse(read_file(path));
    CategoryTable t;
    for (const auto& e : doc.at("categories")) {
        std::string name = e.at("name").get<std::string>();
        t.categories.push_back(name);
        if (e.value("excluded", false)) t.excluded.insert(name);
    }
    return t;
}

bool CategoryTable::known(const std::string& category) const {
    for (const auto& c : categories)
        if (c == category) return true;
    return false;
}

std::string CategoryTable::to_json_text() const {
    json arr = json::array();
    for (const auto& c : categories) {
        json o{{"name", c}};
        if (excluded.count(c)) o["excluded"] = true;
        arr.push_back(o);
    }
    return json{{"categories", arr}}.dump(2) + "\n";
}

LabelIngest ingest_labels_text(const std::string& text, const CategoryTable& table) {
    LabelIngest out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedRecord(lineno, e.what());
        }
        DataSafetyLabel label;
        try {
            label.app_id = j.at("app_id").get<std::string>();
            label.submitted = j.at("submitted").get<bool>();
            auto take = [&](const char* field, std::set<std::string>& into) {
                for (const auto& c : j.value(field, std::vector<std::string>{})) {
                    if (!table.known(c)) {
                        out.warnings.push_back("line " + std::to_string(lineno) +
                                               ": unknown category '" + c + "' dropped");
                        continue;
                    }
                    into.insert(c);
                }
            };
            take("collected", label.collected);
            take("shared", label.shared);
        } catch (const json::exception& e) {
            throw MalformedRecord(lineno, e.what());
        }
        if (!label.submitted && (!label.collected.empty() || !label.shared.empty())) {
            out.warnings.push_back("line " + std::to_string(lineno) +
                                   ": unsubmitted label with categories, categories cleared");
            label.collected.clear();
            label.shared.clear();
        }
        out.labels.push_back(std::move(label));
    }
    return out;
}

LabelIngest ingest_labels(const std::filesystem::path& path, const CategoryTable& table) {
    return ingest_labels_text(read_file(path), table);
}

SensitivityClass classify_sensitivity(const DataSafetyLabel& label, const CategoryTable& table) {
    if (!label.submitted) return SensitivityClass::NoLabel;
    for (const auto& c : label.collected) {
        if (!table.excluded.count(c)) return SensitivityClass::Sensitive;
    }
    return SensitivityClass::Benign;
}

}  // namespace keyscan
