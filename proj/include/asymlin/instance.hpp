#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asymlin/bilinear_ops.hpp"

namespace asymlin {

/// Parse failure with the 1-based position of the offending token.
struct parse_error : input_error {
    parse_error(const std::string& what, int line, int col)
        : input_error("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      what),
          line(line),
          col(col) {}
    int line;
    int col;
};

/// Textual instance: named spaces, operators bound to spaces, and a list of
/// directives to execute against them. Format version "asymlin/1".
struct InstanceFile {
    struct OpDef {
        std::string source, target;
        QMat matrix;
    };
    struct TensorDef {
        std::string source1, source2, target;
        QTensor tensor;
    };
    struct FormDef {
        std::string source1, source2;
        QMat matrix;
    };
    struct Directive {
        std::string op;
        std::vector<std::string> args;
        std::optional<std::string> expect; // absent: report-only
    };

    std::map<std::string, AsymNorm> spaces;
    std::map<std::string, OpDef> ops;
    std::map<std::string, TensorDef> tensors;
    std::map<std::string, FormDef> forms;
    std::vector<Directive> directives;
};

namespace detail {

struct Token {
    std::string text;
    int line;
    int col;
};

inline std::vector<std::vector<Token>> tokenize_lines(const std::string& text) {
    std::vector<std::vector<Token>> lines;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::vector<Token> toks;
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
            if (i >= raw.size() || raw[i] == '#') break;
            std::size_t start = i;
            while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r' &&
                   raw[i] != '#')
                ++i;
            toks.push_back({raw.substr(start, i - start), lineno, static_cast<int>(start + 1)});
        }
        if (!toks.empty()) lines.push_back(std::move(toks));
    }
    return lines;
}

inline Rational parse_rational_token(const Token& t) {
    auto q = parse_rational(t.text);
    if (!q) throw parse_error("invalid rational '" + t.text + "'", t.line, t.col);
    return *q;
}

inline QVec parse_vector_token(const Token& t, int dim) {
    QVec v;
    std::string cur;
    int col = t.col;
    auto flush = [&]() {
        auto q = parse_rational(cur);
        if (!q) throw parse_error("invalid rational '" + cur + "'", t.line, col);
        v.push_back(*q);
        cur.clear();
    };
    for (std::size_t i = 0; i <= t.text.size(); ++i) {
        if (i == t.text.size() || t.text[i] == ',') {
            flush();
            col = t.col + static_cast<int>(i) + 1;
        } else {
            cur += t.text[i];
        }
    }
    if (dim >= 0 && static_cast<int>(v.size()) != dim)
        throw parse_error("vector has " + std::to_string(v.size()) + " entries, expected " +
                              std::to_string(dim),
                          t.line, t.col);
    return v;
}

} // namespace detail

inline InstanceFile parse_instance(const std::string& text, const Caps& caps = Caps{}) {
    auto lines = detail::tokenize_lines(text);
    if (lines.empty() || lines[0].size() != 1 || lines[0][0].text != "asymlin/1")
        throw parse_error("missing format header 'asymlin/1'", 1, 1);

    InstanceFile f;
    std::size_t li = 1;
    auto resolve_space = [&](const detail::Token& t) -> const AsymNorm& {
        auto it = f.spaces.find(t.text);
        if (it == f.spaces.end())
            throw parse_error("unknown space '" + t.text + "'", t.line, t.col);
        return it->second;
    };

    while (li < lines.size()) {
        const auto& head = lines[li];
        const std::string& kw = head[0].text;
        if (kw == "space") {
            if (head.size() != 4 || head[2].text != "dim")
                throw parse_error("expected: space <name> dim <n>", head[0].line, head[0].col);
            std::string name = head[1].text;
            if (f.spaces.count(name))
                throw parse_error("duplicate space '" + name + "'", head[1].line, head[1].col);
            int dim = 0;
            try {
                dim = std::stoi(head[3].text);
            } catch (...) {
                throw parse_error("invalid dimension '" + head[3].text + "'", head[3].line,
                                  head[3].col);
            }
            std::vector<QVec> gens;
            ++li;
            while (li < lines.size() && lines[li][0].text == "gen") {
                const auto& row = lines[li];
                if (static_cast<int>(row.size()) != dim + 1)
                    throw parse_error("generator row needs " + std::to_string(dim) + " entries",
                                      row[0].line, row[0].col);
                QVec g;
                for (int j = 1; j <= dim; ++j) g.push_back(detail::parse_rational_token(row[j]));
                gens.push_back(std::move(g));
                ++li;
            }
            if (li >= lines.size() || lines[li][0].text != "end")
                throw parse_error("space block not closed by 'end'", head[0].line, head[0].col);
            ++li;
            try {
                f.spaces.emplace(name, make_asym_norm(dim, std::move(gens), caps));
            } catch (const std::exception& e) {
                throw parse_error("space '" + name + "': " + e.what(), head[0].line, head[0].col);
            }
        } else if (kw == "op") {
            if (head.size() != 4)
                throw parse_error("expected: op <name> <source> <target>", head[0].line,
                                  head[0].col);
            std::string name = head[1].text;
            const AsymNorm& src = resolve_space(head[2]);
            const AsymNorm& tgt = resolve_space(head[3]);
            QMat m;
            ++li;
            while (li < lines.size() && lines[li][0].text == "row") {
                const auto& row = lines[li];
                if (static_cast<int>(row.size()) != src.dim + 1)
                    throw parse_error("matrix row needs " + std::to_string(src.dim) + " entries",
                                      row[0].line, row[0].col);
                QVec r;
                for (int j = 1; j <= src.dim; ++j) r.push_back(detail::parse_rational_token(row[j]));
                m.push_back(std::move(r));
                ++li;
            }
            if (li >= lines.size() || lines[li][0].text != "end")
                throw parse_error("op block not closed by 'end'", head[0].line, head[0].col);
            ++li;
            if (static_cast<int>(m.size()) != tgt.dim)
                throw parse_error("op '" + name + "' needs " + std::to_string(tgt.dim) + " rows",
                                  head[0].line, head[0].col);
            f.ops[name] = {head[2].text, head[3].text, std::move(m)};
        } else if (kw == "tensor") {
            if (head.size() != 5)
                throw parse_error("expected: tensor <name> <source1> <source2> <target>",
                                  head[0].line, head[0].col);
            std::string name = head[1].text;
            const AsymNorm& s1 = resolve_space(head[2]);
            const AsymNorm& s2 = resolve_space(head[3]);
            const AsymNorm& tg = resolve_space(head[4]);
            QTensor tensor(tg.dim, QMat(s1.dim, QVec(s2.dim, Rational(0))));
            ++li;
            while (li < lines.size() && lines[li][0].text == "entry") {
                const auto& row = lines[li];
                if (row.size() != 5)
                    throw parse_error("expected: entry <k> <i> <j> <value>", row[0].line,
                                      row[0].col);
                int k, i, j;
                try {
                    k = std::stoi(row[1].text);
                    i = std::stoi(row[2].text);
                    j = std::stoi(row[3].text);
                } catch (...) {
                    throw parse_error("invalid tensor index", row[1].line, row[1].col);
                }
                if (k < 0 || k >= tg.dim || i < 0 || i >= s1.dim || j < 0 || j >= s2.dim)
                    throw parse_error("tensor index out of range", row[1].line, row[1].col);
                tensor[k][i][j] = detail::parse_rational_token(row[4]);
                ++li;
            }
            if (li >= lines.size() || lines[li][0].text != "end")
                throw parse_error("tensor block not closed by 'end'", head[0].line, head[0].col);
            ++li;
            f.tensors[name] = {head[2].text, head[3].text, head[4].text, std::move(tensor)};
        } else if (kw == "form") {
            if (head.size() != 4)
                throw parse_error("expected: form <name> <source1> <source2>", head[0].line,
                                  head[0].col);
            std::string name = head[1].text;
            const AsymNorm& s1 = resolve_space(head[2]);
            const AsymNorm& s2 = resolve_space(head[3]);
            QMat m;
            ++li;
            while (li < lines.size() && lines[li][0].text == "row") {
                const auto& row = lines[li];
                if (static_cast<int>(row.size()) != s2.dim + 1)
                    throw parse_error("form row needs " + std::to_string(s2.dim) + " entries",
                                      row[0].line, row[0].col);
                QVec r;
                for (int j = 1; j <= s2.dim; ++j) r.push_back(detail::parse_rational_token(row[j]));
                m.push_back(std::move(r));
                ++li;
            }
            if (li >= lines.size() || lines[li][0].text != "end")
                throw parse_error("form block not closed by 'end'", head[0].line, head[0].col);
            ++li;
            if (static_cast<int>(m.size()) != s1.dim)
                throw parse_error("form '" + name + "' needs " + std::to_string(s1.dim) + " rows",
                                  head[0].line, head[0].col);
            f.forms[name] = {head[2].text, head[3].text, std::move(m)};
        } else if (kw == "check") {
            if (head.size() < 3)
                throw parse_error("expected: check <operation> <args...> (expect <value>|report)",
                                  head[0].line, head[0].col);
            InstanceFile::Directive d;
            d.op = head[1].text;
            std::size_t j = 2;
            while (j < head.size() && head[j].text != "expect" && head[j].text != "report")
                d.args.push_back(head[j++].text);
            if (j >= head.size())
                throw parse_error("directive needs 'expect <value>' or 'report'", head[0].line,
                                  head[0].col);
            if (head[j].text == "expect") {
                if (j + 1 >= head.size())
                    throw parse_error("'expect' needs a value", head[j].line, head[j].col);
                d.expect = head[j + 1].text;
            }
            f.directives.push_back(std::move(d));
            ++li;
        } else {
            throw parse_error("unknown keyword '" + kw + "'", head[0].line, head[0].col);
        }
    }

    // semantic pass: every directive must reference a known name
    for (const auto& d : f.directives) {
        if (d.args.empty()) throw input_error("directive '" + d.op + "' has no arguments");
        const std::string& key = d.args[0];
        bool known;
        if (d.op == "opnorm" || d.op == "adjnorm") known = f.ops.count(key) > 0;
        else if (d.op == "bilinnorm" || d.op == "symnorm" || d.op == "arensnorm")
            known = f.tensors.count(key) > 0;
        else if (d.op == "formnorm") known = f.forms.count(key) > 0;
        else known = f.spaces.count(key) > 0;
        if (!known)
            throw input_error("directive '" + d.op + "' references unknown name '" + key + "'");
    }
    return f;
}

inline std::string serialize_vector(const QVec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += to_string(v[i]);
    }
    return s;
}

/// Canonical text form; parse(serialize(f)) reproduces f and serialization
/// is a fixed point on its own output.
inline std::string serialize_instance(const InstanceFile& f) {
    std::ostringstream out;
    out << "asymlin/1\n";
    for (const auto& [name, p] : f.spaces) {
        out << "space " << name << " dim " << p.dim << "\n";
        for (const auto& g : p.generators) {
            out << "  gen";
            for (const auto& q : g) out << " " << to_string(q);
            out << "\n";
        }
        out << "end\n";
    }
    for (const auto& [name, op] : f.ops) {
        out << "op " << name << " " << op.source << " " << op.target << "\n";
        for (const auto& row : op.matrix) {
            out << "  row";
            for (const auto& q : row) out << " " << to_string(q);
            out << "\n";
        }
        out << "end\n";
    }
    for (const auto& [name, t] : f.tensors) {
        out << "tensor " << name << " " << t.source1 << " " << t.source2 << " " << t.target
            << "\n";
        for (std::size_t k = 0; k < t.tensor.size(); ++k)
            for (std::size_t i = 0; i < t.tensor[k].size(); ++i)
                for (std::size_t j = 0; j < t.tensor[k][i].size(); ++j)
                    if (t.tensor[k][i][j] != 0)
                        out << "  entry " << k << " " << i << " " << j << " "
                            << to_string(t.tensor[k][i][j]) << "\n";
        out << "end\n";
    }
    for (const auto& [name, b] : f.forms) {
        out << "form " << name << " " << b.source1 << " " << b.source2 << "\n";
        for (const auto& row : b.matrix) {
            out << "  row";
            for (const auto& q : row) out << " " << to_string(q);
            out << "\n";
        }
        out << "end\n";
    }
    for (const auto& d : f.directives) {
        out << "check " << d.op;
        for (const auto& a : d.args) out << " " << a;
        if (d.expect) out << " expect " << *d.expect;
        else out << " report";
        out << "\n";
    }
    return out.str();
}

/// Result of running one directive.
struct DirectiveResult {
    std::string description;
    std::string value;  // exact rational string or "inf"
    bool checked;       // an expectation was present
    bool ok;            // value matched (always true for report directives)
};

inline DirectiveResult run_directive(const InstanceFile& f, const InstanceFile::Directive& d,
                                     const Caps& caps = Caps{}) {
    auto space = [&](const std::string& n) -> const AsymNorm& {
        auto it = f.spaces.find(n);
        if (it == f.spaces.end()) throw input_error("unknown space '" + n + "'");
        return it->second;
    };
    auto vec = [&](const std::string& raw, int dim) {
        detail::Token t{raw, 0, 0};
        try {
            return detail::parse_vector_token(t, dim);
        } catch (const parse_error& e) {
            throw input_error(std::string("bad vector argument: ") + e.what());
        }
    };
    auto need_args = [&](std::size_t n) {
        if (d.args.size() != n)
            throw input_error("directive '" + d.op + "' needs " + std::to_string(n) +
                              " arguments");
    };

    std::string value;
    if (d.op == "eval") {
        need_args(2);
        const AsymNorm& p = space(d.args[0]);
        value = to_string(eval_norm(p, vec(d.args[1], p.dim)));
    } else if (d.op == "conj") {
        need_args(2);
        const AsymNorm& p = space(d.args[0]);
        value = to_string(eval_norm(conjugate(p), vec(d.args[1], p.dim)));
    } else if (d.op == "sym") {
        need_args(2);
        const AsymNorm& p = space(d.args[0]);
        value = to_string(eval_norm(symmetrize(p), vec(d.args[1], p.dim)));
    } else if (d.op == "dist") {
        need_args(3);
        const AsymNorm& p = space(d.args[0]);
        value = to_string(quasi_metric(p, vec(d.args[1], p.dim), vec(d.args[2], p.dim)));
    } else if (d.op == "dualnorm") {
        need_args(2);
        const AsymNorm& p = space(d.args[0]);
        value = to_string(dual_norm(p, vec(d.args[1], p.dim)));
    } else if (d.op == "opnorm" || d.op == "adjnorm") {
        need_args(1);
        auto it = f.ops.find(d.args[0]);
        if (it == f.ops.end()) throw input_error("unknown op '" + d.args[0] + "'");
        auto a = make_linear_op(it->second.matrix, space(it->second.source),
                                space(it->second.target));
        value = d.op == "opnorm" ? to_string(op_norm(a))
                                 : to_string(adjoint_norm(adjoint(a, caps), a));
    } else if (d.op == "bilinnorm" || d.op == "symnorm" || d.op == "arensnorm") {
        need_args(1);
        auto it = f.tensors.find(d.args[0]);
        if (it == f.tensors.end()) throw input_error("unknown tensor '" + d.args[0] + "'");
        auto t = make_bilinear_op(it->second.tensor, space(it->second.source1),
                                  space(it->second.source2), space(it->second.target));
        if (d.op == "bilinnorm") value = to_string(bilin_norm(t, caps));
        else if (d.op == "symnorm") value = to_string(sym_norm(t, caps));
        else value = to_string(arens_norm(t, caps));
    } else if (d.op == "formnorm") {
        need_args(1);
        auto it = f.forms.find(d.args[0]);
        if (it == f.forms.end()) throw input_error("unknown form '" + d.args[0] + "'");
        auto b = make_bilinear_form(it->second.matrix, space(it->second.source1),
                                    space(it->second.source2));
        value = to_string(form_norm(b, caps));
    } else {
        throw input_error("unknown directive operation '" + d.op + "'");
    }

    DirectiveResult res;
    res.description = d.op;
    for (const auto& a : d.args) res.description += " " + a;
    res.value = value;
    res.checked = d.expect.has_value();
    if (res.checked) {
        // compare as exact values, accepting either integer or num/den text
        std::string want = *d.expect;
        bool same;
        if (want == "inf" || value == "inf") {
            same = want == value;
        } else {
            auto qa = parse_rational(want);
            auto qb = parse_rational(value);
            same = qa && qb && *qa == *qb;
        }
        res.ok = same;
    } else {
        res.ok = true;
    }
    return res;
}

} // namespace asymlin
