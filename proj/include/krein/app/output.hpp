#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace krein::app {

using Json = nlohmann::json;

// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::string& path, const std::string& contents);

// NaN and infinities become JSON null.
Json number(double v);

// %.17g; non-finite values as nan, inf, -inf.
std::string format_double(double v);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(const std::vector<double>& row);
    void add_text(const std::vector<std::string>& row);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Two-space indented JSON with sorted keys and a trailing newline.
std::string dump(const Json& doc);

}  // namespace krein::app
