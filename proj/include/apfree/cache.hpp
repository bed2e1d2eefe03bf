#pragma once

// JSON-backed store for count results, so expensive exact counts survive
// between runs.  Counts are decimal strings (they outgrow every fixed-width
// integer), and a stored value never changes silently: re-putting a query
// with a different count is a conflict.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "apfree/core.hpp"
#include "apfree/counting.hpp"

namespace apfree {

class CountCache {
public:
    explicit CountCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

    std::size_t size() const { return entries_.size(); }
    const std::filesystem::path& path() const { return path_; }

    std::optional<CountRecord> get(const CountQuery& q) const {
        for (const auto& e : entries_)
            if (e.query == q) return CountRecord{e.query, e.count, 0, {}};
        return std::nullopt;
    }

    // Inserts and persists.  A hit with an equal count is a no-op; a hit
    // with a different count aborts — a cached exact value may never drift.
    void put(const CountRecord& rec) {
        for (const auto& e : entries_) {
            if (e.query == rec.query) {
                if (e.count == rec.count) return;
                throw conflict_error("cache conflict for n=" + std::to_string(rec.query.n) +
                                     " k=" + std::to_string(rec.query.constraint.k) + " parity=" +
                                     to_string(rec.query.constraint.parity) + " prefix=" +
                                     rec.query.prefix.to_text() + ": stored " + e.count.str() +
                                     ", new " + rec.count.str());
            }
        }
        entries_.push_back({rec.query, rec.count});
        save();
    }

private:
    struct Entry {
        CountQuery query;
        BigInt count;
    };

    void load() {
        std::error_code ec;
        if (!std::filesystem::exists(path_, ec)) return;
        std::ifstream in(path_);
        if (!in) throw format_error("cannot open cache file " + path_.string());
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw format_error("cache file " + path_.string() + " is not valid JSON: " + e.what());
        }
        if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer() ||
            doc["version"].get<int>() != 1)
            throw format_error("cache file " + path_.string() + ": expected object with version 1");
        if (!doc.contains("entries") || !doc["entries"].is_array())
            throw format_error("cache file " + path_.string() + ": missing entries array");

        std::size_t idx = 0;
        for (const auto& item : doc["entries"]) {
            const std::string where = "cache entry #" + std::to_string(idx) + " in " + path_.string();
            ++idx;
            if (!item.is_object()) throw format_error(where + ": not an object");
            for (const char* key : {"n", "k", "parity", "prefix", "count"})
                if (!item.contains(key)) throw format_error(where + ": missing field '" + key + "'");
            if (!item["n"].is_number_integer() || !item["k"].is_number_integer())
                throw format_error(where + ": n and k must be integers");
            if (!item["parity"].is_string() || !item["count"].is_string() || !item["prefix"].is_array())
                throw format_error(where + ": parity/count must be strings, prefix an array");

            const Value n = item["n"].get<Value>();
            const int k = item["k"].get<int>();
            std::vector<Value> prefix;
            for (const auto& pv : item["prefix"]) {
                if (!pv.is_number_integer()) throw format_error(where + ": prefix holds a non-integer");
                prefix.push_back(pv.get<Value>());
            }
            const std::string count_text = item["count"].get<std::string>();
            if (count_text.empty() ||
                count_text.find_first_not_of("0123456789") != std::string::npos)
                throw format_error(where + ": count '" + count_text + "' is not a decimal string");
            try {
                Parity parity = parse_parity(item["parity"].get<std::string>());
                entries_.push_back(
                    {CountQuery(n, APConstraint(k, parity), Seq(std::move(prefix))), BigInt(count_text)});
            } catch (const error& e) {
                throw format_error(where + ": " + e.what());
            }
        }
    }

    void save() const {
        nlohmann::json doc;
        doc["version"] = 1;
        doc["entries"] = nlohmann::json::array();
        for (const auto& e : entries_) {
            nlohmann::json item;
            item["n"] = e.query.n;
            item["k"] = e.query.constraint.k;
            item["parity"] = to_string(e.query.constraint.parity);
            item["prefix"] = e.query.prefix.values();
            item["count"] = e.count.str();
            doc["entries"].push_back(std::move(item));
        }
        const std::filesystem::path tmp = path_.string() + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw format_error("cannot write cache file " + tmp.string());
            out << doc.dump(2) << '\n';
        }
        std::filesystem::rename(tmp, path_);
    }

    std::filesystem::path path_;
    std::vector<Entry> entries_;
};

}  // namespace apfree
