// Reader/writer for the problem-file format: a small TOML subset with
// `key = value` lines, '#' comments, basic strings, integers, floats,
// booleans and (possibly multi-line, nested) arrays.

#include "ccop/error.hpp"
#include "ccop/problem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace ccop {

namespace {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<long long, double, bool, std::string, Array> data;
    std::size_t offset = 0;  // where the value starts in the file
    std::size_t content_offset = 0;  // strings: first byte after the quote
};

struct Entry {
    Value value;
    std::size_t key_offset = 0;
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::map<std::string, Entry> read() {
        std::map<std::string, Entry> out;
        for (;;) {
            skip_blank_lines();
            if (at_end()) break;
            const std::size_t key_start = pos_;
            std::string key = read_key();
            skip_inline_ws();
            if (!consume('=')) fail("expected '=' after key '" + key + "'");
            skip_inline_ws();
            Value v = read_value();
            skip_inline_ws();
            skip_comment();
            if (!at_end() && peek() != '\n' && peek() != '\r') fail("unexpected text after value");
            if (out.count(key)) fail_at("duplicate key '" + key + "'", key_start);
            out.emplace(std::move(key), Entry{std::move(v), key_start});
        }
        return out;
    }

    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                             msg,
                         at, line, col);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    bool consume(char c) {
        if (!at_end() && peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void skip_inline_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_comment() {
        if (!at_end() && peek() == '#')
            while (!at_end() && peek() != '\n') ++pos_;
    }

    void skip_blank_lines() {
        for (;;) {
            skip_inline_ws();
            skip_comment();
            if (!at_end() && (peek() == '\n' || peek() == '\r'))
                ++pos_;
            else
                return;
        }
    }

    // inside arrays newlines and comments are insignificant
    void skip_array_ws() {
        for (;;) {
            skip_inline_ws();
            skip_comment();
            if (!at_end() && (peek() == '\n' || peek() == '\r'))
                ++pos_;
            else
                return;
        }
    }

    std::string read_key() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                             peek() == '-'))
            ++pos_;
        if (pos_ == start) fail("expected a key");
        return std::string(text_.substr(start, pos_ - start));
    }

    Value read_value() {
        if (at_end()) fail("expected a value");
        Value v;
        v.offset = pos_;
        const char c = peek();
        if (c == '"') {
            ++pos_;
            v.content_offset = pos_;
            std::string s;
            for (;;) {
                if (at_end() || peek() == '\n') fail_at("unterminated string", v.offset);
                char ch = text_[pos_++];
                if (ch == '"') break;
                if (ch == '\\') {
                    if (at_end()) fail_at("unterminated string", v.offset);
                    const char esc = text_[pos_++];
                    switch (esc) {
                        case '"': s += '"'; break;
                        case '\\': s += '\\'; break;
                        case 'n': s += '\n'; break;
                        case 't': s += '\t'; break;
                        default: fail_at(std::string("unsupported escape '\\") + esc + "'", pos_ - 2);
                    }
                } else {
                    s += ch;
                }
            }
            v.data = std::move(s);
            return v;
        }
        if (c == '[') {
            ++pos_;
            Array items;
            skip_array_ws();
            if (consume(']')) {
                v.data = std::move(items);
                return v;
            }
            for (;;) {
                skip_array_ws();
                items.push_back(read_value());
                skip_array_ws();
                if (consume(',')) {
                    skip_array_ws();
                    if (consume(']')) break;
                    continue;
                }
                if (consume(']')) break;
                fail("expected ',' or ']' in array");
            }
            v.data = std::move(items);
            return v;
        }
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            v.data = true;
            return v;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            v.data = false;
            return v;
        }
        return read_number();
    }

    Value read_number() {
        Value v;
        v.offset = pos_;
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '+' ||
                text_[end] == '-' || text_[end] == '.' || text_[end] == '_'))
            ++end;
        std::string tok(text_.substr(pos_, end - pos_));
        std::erase(tok, '_');
        if (tok.empty()) fail("expected a value");
        const bool is_float = tok.find_first_of(".eE") != std::string::npos;
        const char* first = tok.c_str();
        const char* last = first + tok.size();
        if (*first == '+') ++first;
        if (is_float) {
            double d = 0.0;
            auto res = std::from_chars(first, last, d);
            if (res.ec != std::errc() || res.ptr != last || !std::isfinite(d))
                fail("malformed number '" + tok + "'");
            v.data = d;
        } else {
            long long i = 0;
            auto res = std::from_chars(first, last, i);
            if (res.ec != std::errc() || res.ptr != last) fail("malformed value '" + tok + "'");
            v.data = i;
        }
        pos_ = end;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

const std::set<std::string> kKnownKeys = {"n",           "s",   "objective",       "equalities",
                                          "inequalities", "box", "compact_feasible"};

class Builder {
public:
    Builder(const Reader& reader, std::string_view text) : reader_(reader), text_(text) {}

    long long integer(const Entry& e, const std::string& key) const {
        if (auto p = std::get_if<long long>(&e.value.data)) return *p;
        reader_.fail_at("'" + key + "' must be an integer", e.value.offset);
    }

    double number(const Value& v, const std::string& what) const {
        if (auto p = std::get_if<long long>(&v.data)) return static_cast<double>(*p);
        if (auto p = std::get_if<double>(&v.data)) return *p;
        reader_.fail_at(what + " must be a number", v.offset);
    }

    Expr expression(const Value& v, const std::string& what, int n) const {
        auto s = std::get_if<std::string>(&v.data);
        if (!s) reader_.fail_at(what + " must be a string", v.offset);
        Expr e;
        try {
            e = parse(*s);
        } catch (const ParseError& err) {
            // escapes are rare in expressions; the offset is exact without them
            reader_.fail_at(what + ": " + err.what(), v.content_offset + err.offset());
        }
        if (e.max_variable() > n)
            reader_.fail_at(what + ": variable x" + std::to_string(e.max_variable()) +
                                " exceeds n = " + std::to_string(n),
                            v.offset);
        return e;
    }

    std::vector<Expr> expression_list(const Entry* e, const std::string& key, int n) const {
        std::vector<Expr> out;
        if (!e) return out;
        auto arr = std::get_if<Array>(&e->value.data);
        if (!arr) reader_.fail_at("'" + key + "' must be an array of strings", e->value.offset);
        for (std::size_t i = 0; i < arr->size(); ++i)
            out.push_back(expression((*arr)[i], key + "[" + std::to_string(i + 1) + "]", n));
        return out;
    }

private:
    const Reader& reader_;
    std::string_view text_;
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

Problem parse_problem(std::string_view text) {
    Reader reader(text);
    const auto entries = reader.read();
    for (const auto& [key, entry] : entries)
        if (!kKnownKeys.count(key)) reader.fail_at("unknown key '" + key + "'", entry.key_offset);

    auto find = [&](const std::string& key) -> const Entry* {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto require = [&](const std::string& key) -> const Entry& {
        const Entry* e = find(key);
        if (!e) reader.fail_at("missing required key '" + key + "'", text.size());
        return *e;
    };

    Builder b(reader, text);
    const Entry& n_entry = require("n");
    const long long n = b.integer(n_entry, "n");
    if (n < 1 || n > 64) reader.fail_at("n must be in [1, 64]", n_entry.value.offset);
    const Entry& s_entry = require("s");
    const long long s = b.integer(s_entry, "s");
    if (s < 0) reader.fail_at("s must be >= 0", s_entry.value.offset);
    if (s >= n) reader.fail_at("s must be < n", s_entry.value.offset);

    const Expr objective = b.expression(require("objective").value, "objective", static_cast<int>(n));
    std::vector<Expr> eqs = b.expression_list(find("equalities"), "equalities", static_cast<int>(n));
    std::vector<Expr> ineqs =
        b.expression_list(find("inequalities"), "inequalities", static_cast<int>(n));

    const Entry& box_entry = require("box");
    auto box_arr = std::get_if<Array>(&box_entry.value.data);
    if (!box_arr || static_cast<long long>(box_arr->size()) != n)
        reader.fail_at("'box' must be an array of n [lo, hi] pairs", box_entry.value.offset);
    std::vector<Interval> box;
    for (std::size_t i = 0; i < box_arr->size(); ++i) {
        const Value& item = (*box_arr)[i];
        auto pair = std::get_if<Array>(&item.data);
        if (!pair || pair->size() != 2)
            reader.fail_at("box entry " + std::to_string(i + 1) + " must be [lo, hi]", item.offset);
        const double lo = b.number((*pair)[0], "box bound");
        const double hi = b.number((*pair)[1], "box bound");
        if (!(lo <= hi))
            reader.fail_at("box entry " + std::to_string(i + 1) + " is empty (lo > hi)", item.offset);
        box.push_back({lo, hi});
    }

    bool compact = false;
    if (const Entry* e = find("compact_feasible")) {
        auto flag = std::get_if<bool>(&e->value.data);
        if (!flag) reader.fail_at("'compact_feasible' must be true or false", e->value.offset);
        compact = *flag;
    }

    return Problem(static_cast<int>(n), static_cast<int>(s), objective, std::move(eqs),
                   std::move(ineqs), std::move(box), compact);
}

Problem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open problem file '" + path.string() + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_problem(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset(), e.line(), e.column());
    }
}

std::string Problem::canonical_text() const {
    std::ostringstream out;
    out << "n = " << n_ << "\n";
    out << "s = " << s_ << "\n";
    out << "objective = " << quote(objective_.expr().to_string()) << "\n";
    auto list = [&](const char* key, const std::vector<SmoothFunction>& fs) {
        out << key << " = [";
        for (std::size_t i = 0; i < fs.size(); ++i)
            out << (i ? ", " : "") << quote(fs[i].expr().to_string());
        out << "]\n";
    };
    list("equalities", equalities_);
    list("inequalities", inequalities_);
    out << "box = [";
    for (std::size_t i = 0; i < box_.size(); ++i)
        out << (i ? ", " : "") << "[" << format_double(box_[i].lo) << ", "
            << format_double(box_[i].hi) << "]";
    out << "]\n";
    out << "compact_feasible = " << (compact_ ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace ccop
