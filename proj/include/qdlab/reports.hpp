#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qdlab {

/**
 * @brief Minimal JSON document with insertion-ordered object keys.
 *
 * Reports must serialize byte-identically across runs, so keys keep the
 * order they were added in and floating-point values are printed with 17
 * significant digits.
 */
class Json {
   public:
    Json() : value_(nullptr) {}
    Json(bool b) : value_(b) {}
    Json(std::int64_t i) : value_(i) {}
    Json(std::uint64_t u) : value_(static_cast<std::int64_t>(u)) {}
    Json(int i) : value_(static_cast<std::int64_t>(i)) {}
    Json(unsigned i) : value_(static_cast<std::int64_t>(i)) {}
    Json(double d) : value_(d) {}
    Json(const char* s) : value_(std::string(s)) {}
    Json(std::string s) : value_(std::move(s)) {}

    static Json object() {
        Json j;
        j.value_ = Object{};
        return j;
    }
    static Json array() {
        Json j;
        j.value_ = Array{};
        return j;
    }

    Json& set(const std::string& key, Json v) {
        std::get<Object>(value_).emplace_back(key, std::move(v));
        return *this;
    }
    Json& push(Json v) {
        std::get<Array>(value_).push_back(std::move(v));
        return *this;
    }

    std::string dump() const {
        std::string out;
        write(out);
        return out;
    }

   private:
    struct Object;
    struct Array;
    using Value =
        std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Object, Array>;

    struct Object : std::vector<std::pair<std::string, Json>> {};
    struct Array : std::vector<Json> {};

    static void write_string(std::string& out, const std::string& s) {
        out += '"';
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        out += '"';
    }

    void write(std::string& out) const {
        if (std::holds_alternative<std::nullptr_t>(value_)) {
            out += "null";
        } else if (auto b = std::get_if<bool>(&value_)) {
            out += *b ? "true" : "false";
        } else if (auto i = std::get_if<std::int64_t>(&value_)) {
            out += std::to_string(*i);
        } else if (auto d = std::get_if<double>(&value_)) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", *d);
            out += buf;
        } else if (auto s = std::get_if<std::string>(&value_)) {
            write_string(out, *s);
        } else if (auto obj = std::get_if<Object>(&value_)) {
            out += '{';
            bool first = true;
            for (const auto& [k, v] : *obj) {
                if (!first) out += ',';
                first = false;
                write_string(out, k);
                out += ':';
                v.write(out);
            }
            out += '}';
        } else if (auto arr = std::get_if<Array>(&value_)) {
            out += '[';
            bool first = true;
            for (const auto& v : *arr) {
                if (!first) out += ',';
                first = false;
                v.write(out);
            }
            out += ']';
        }
    }

    Value value_;
};

inline std::string format_float(double d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

/// Plain aligned-column text table for the human-readable format.
class TextTable {
   public:
    explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& os) const {
        std::vector<std::size_t> width(header_.size(), 0);
        for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
        for (const auto& row : rows_)
            for (std::size_t c = 0; c < row.size() && c < width.size(); ++c)
                width[c] = std::max(width[c], row[c].size());
        auto line = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                os << row[c];
                if (c + 1 < row.size())
                    os << std::string(width[c] - row[c].size() + 2, ' ');
            }
            os << '\n';
        };
        line(header_);
        for (const auto& row : rows_) line(row);
    }

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace qdlab
