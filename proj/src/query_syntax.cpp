#include "query_syntax.hpp"

#include <algorithm>
#include <cctype>

#include "causeway/errors.hpp"
#include "causeway/values.hpp"

namespace causeway::detail {

namespace {

class QueryScanner {
public:
    QueryScanner(std::string_view text, const std::vector<std::string>& known) : text_(text), known_(known) {}

    QuerySyntax parse() {
        QuerySyntax q;
        expect("P");
        expect("(");
        q.outcome = items(false);
        if (accept("|")) q.given = items(true);
        expect(")");
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        if (q.outcome.empty()) fail("query has no outcome");
        return q;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view s) {
        skip_ws();
        if (text_.substr(pos_).starts_with(s)) {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view s) {
        if (!accept(s)) fail("expected '" + std::string(s) + "'");
    }

    static bool word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.' || c == '-';
    }

    std::string word() {
        skip_ws();
        auto start = pos_;
        while (pos_ < text_.size() && word_char(text_[pos_]) && !text_.substr(pos_).starts_with("_{")) ++pos_;
        if (start == pos_) fail("expected a variable");
        return std::string(text_.substr(start, pos_ - start));
    }

    bool is_known(const std::string& name) const {
        return std::any_of(known_.begin(), known_.end(),
                           [&](const std::string& k) { return k == name || to_lower(k) == name; });
    }

    std::vector<QueryItem> items(bool allow_do) {
        std::vector<QueryItem> out;
        do {
            skip_ws();
            QueryItem item;
            item.column = pos_ + 1;
            if (allow_do && accept("do(")) {
                item.is_do = true;
                item.do_items = items(false);
                expect(")");
                out.push_back(std::move(item));
                continue;
            }
            item.name = word();
            if (accept("_{")) {
                item.subscript = items(false);
                expect("}");
            } else if (auto us = item.name.find('_');
                       us != std::string::npos && us > 0 && !is_known(item.name) &&
                       (!known_.empty() || std::islower(static_cast<unsigned char>(item.name.front())))) {
                // `y_x`: subscript by bare symbol
                QueryItem sub;
                sub.name = item.name.substr(us + 1);
                sub.column = item.column + us + 1;
                item.name = item.name.substr(0, us);
                if (sub.name.empty()) fail("empty subscript");
                item.subscript.push_back(std::move(sub));
            }
            if (accept("=")) item.value = word();
            out.push_back(std::move(item));
        } while (accept(","));
        return out;
    }

    std::string_view text_;
    const std::vector<std::string>& known_;
    std::size_t pos_ = 0;
};

}  // namespace

QuerySyntax parse_query_syntax(std::string_view text, const std::vector<std::string>& known) {
    return QueryScanner(text, known).parse();
}

}  // namespace causeway::detail
