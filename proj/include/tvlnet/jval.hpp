#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tvlnet/decimal.hpp"

namespace tvlnet {

/// JSON value tree that keeps numbers as their source text, so decimal
/// amounts survive a parse/serialize cycle without a detour through double.
struct JVal {
    enum class Kind { Null, Bool, Num, Str, Arr, Obj };

    Kind kind = Kind::Null;
    bool boolean = false;
    std::string num;  // raw literal, e.g. "10.25" or "1700000000"
    std::string str;
    std::vector<JVal> arr;
    std::vector<std::pair<std::string, JVal>> obj;  // in document order

    bool is_obj() const { return kind == Kind::Obj; }
    bool is_arr() const { return kind == Kind::Arr; }
    bool is_str() const { return kind == Kind::Str; }
    bool is_num() const { return kind == Kind::Num; }

    const JVal* find(std::string_view key) const {
        if (kind != Kind::Obj) return nullptr;
        for (const auto& [k, v] : obj)
            if (k == key) return &v;
        return nullptr;
    }

    const JVal& at(std::string_view key) const {
        const JVal* v = find(key);
        if (!v) throw std::runtime_error("missing JSON key: " + std::string(key));
        return *v;
    }

    const std::string& as_str() const {
        if (kind != Kind::Str) throw std::runtime_error("JSON value is not a string");
        return str;
    }

    std::int64_t as_i64() const {
        if (kind != Kind::Num) throw std::runtime_error("JSON value is not a number");
        return std::stoll(num);
    }

    double as_double() const {
        if (kind == Kind::Num) return std::stod(num);
        throw std::runtime_error("JSON value is not a number");
    }

    Decimal as_decimal() const {
        if (kind != Kind::Num) throw std::runtime_error("JSON value is not a number");
        if (auto d = Decimal::parse(num)) return *d;
        return Decimal::from_double(std::stod(num));  // exponent form fallback
    }

    bool as_bool() const {
        if (kind != Kind::Bool) throw std::runtime_error("JSON value is not a bool");
        return boolean;
    }
};

namespace detail {

class JValSax {
public:
    using number_integer_t = nlohmann::json::number_integer_t;
    using number_unsigned_t = nlohmann::json::number_unsigned_t;
    using number_float_t = nlohmann::json::number_float_t;
    using string_t = nlohmann::json::string_t;
    using binary_t = nlohmann::json::binary_t;

    explicit JValSax(JVal& root) : root_(root) {}

    bool null() { return put(JVal{}); }
    bool boolean(bool b) {
        JVal v;
        v.kind = JVal::Kind::Bool;
        v.boolean = b;
        return put(std::move(v));
    }
    bool number_integer(number_integer_t i) { return put_num(std::to_string(i)); }
    bool number_unsigned(number_unsigned_t u) { return put_num(std::to_string(u)); }
    bool number_float(number_float_t, const string_t& raw) { return put_num(raw); }
    bool string(string_t& s) {
        JVal v;
        v.kind = JVal::Kind::Str;
        v.str = s;
        return put(std::move(v));
    }
    bool binary(binary_t&) { return false; }
    bool start_object(std::size_t) {
        JVal v;
        v.kind = JVal::Kind::Obj;
        return push(std::move(v));
    }
    bool key(string_t& k) {
        key_ = k;
        have_key_ = true;
        return true;
    }
    bool end_object() { return pop(); }
    bool start_array(std::size_t) {
        JVal v;
        v.kind = JVal::Kind::Arr;
        return push(std::move(v));
    }
    bool end_array() { return pop(); }
    bool parse_error(std::size_t pos, const std::string&, const nlohmann::json::exception& ex) {
        throw std::runtime_error("JSON parse error at byte " + std::to_string(pos) + ": " +
                                 ex.what());
    }

private:
    bool put_num(std::string raw) {
        JVal v;
        v.kind = JVal::Kind::Num;
        v.num = std::move(raw);
        return put(std::move(v));
    }

    JVal* slot() {
        if (stack_.empty()) return &root_;
        JVal* top = stack_.back();
        if (top->kind == JVal::Kind::Arr) {
            top->arr.emplace_back();
            return &top->arr.back();
        }
        if (!have_key_) throw std::runtime_error("JSON object value without key");
        have_key_ = false;
        top->obj.emplace_back(std::move(key_), JVal{});
        return &top->obj.back().second;
    }

    bool put(JVal v) {
        *slot() = std::move(v);
        return true;
    }

    bool push(JVal v) {
        JVal* s = slot();
        *s = std::move(v);
        stack_.push_back(s);
        return true;
    }

    bool pop() {
        stack_.pop_back();
        return true;
    }

    JVal& root_;
    std::vector<JVal*> stack_;
    std::string key_;
    bool have_key_ = false;
};

}  // namespace detail

inline JVal parse_json(std::string_view text) {
    JVal root;
    detail::JValSax sax(root);
    if (!nlohmann::json::sax_parse(text.begin(), text.end(), &sax))
        throw std::runtime_error("JSON parse failed");
    return root;
}

inline void json_escape_to(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
}

inline std::string json_quote(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    json_escape_to(out, s);
    out.push_back('"');
    return out;
}

}  // namespace tvlnet
