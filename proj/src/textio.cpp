#include "grchase/textio.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace grchase {

namespace {

struct Token {
    enum Kind { Ident, Punct, End } kind = End;
    std::string text;
    int line = 0, col = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    Token expect(const std::string& text) {
        if (tok_.text != text)
            throw ParseError("expected '" + text + "', found '" +
                                 (tok_.kind == Token::End ? "<eof>" : tok_.text) + "'",
                             tok_.line, tok_.col);
        return take();
    }
    Token expect_ident() {
        if (tok_.kind != Token::Ident)
            throw ParseError("expected identifier", tok_.line, tok_.col);
        return take();
    }
    bool at_end() const { return tok_.kind == Token::End; }

  private:
    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (isspace(uint8_t(c))) {
                ++col_;
                ++pos_;
            } else {
                break;
            }
        }
        tok_ = Token{Token::End, "", line_, col_};
        if (pos_ >= text_.size()) return;
        char c = text_[pos_];
        int line = line_, col = col_;
        if (isalnum(uint8_t(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() && (isalnum(uint8_t(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '!') ++pos_; // constant marker
            tok_ = Token{Token::Ident, text_.substr(start, pos_ - start), line, col};
        } else if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
            pos_ += 2;
            tok_ = Token{Token::Punct, ":-", line, col};
        } else {
            ++pos_;
            tok_ = Token{Token::Punct, std::string(1, c), line, col};
        }
        col_ = col + int(tok_.text.size());
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

Term term_of_ident(const Token& t) {
    if (!t.text.empty() && t.text.back() == '!') {
        if (!islower(uint8_t(t.text[0])))
            throw ParseError("constants must start with a lowercase letter: " + t.text, t.line,
                             t.col);
        return Term::constant(t.text);
    }
    return Term::var(t.text);
}

struct RawAtom {
    Token pred;
    std::vector<Token> args;
};

RawAtom parse_raw_atom(Lexer& lex) {
    RawAtom a;
    a.pred = lex.expect_ident();
    if (!a.pred.text.empty() && a.pred.text.back() == '!')
        throw ParseError("predicate name cannot be a constant", a.pred.line, a.pred.col);
    lex.expect("(");
    if (lex.peek().text != ")") {
        a.args.push_back(lex.expect_ident());
        while (lex.peek().text == ",") {
            lex.take();
            a.args.push_back(lex.expect_ident());
        }
    }
    lex.expect(")");
    return a;
}

struct RawCq {
    Token name;
    std::vector<Token> free;
    std::vector<RawAtom> body;
};

// Name(v1,...) :- atom, atom, ... .
RawCq parse_raw_cq(Lexer& lex) {
    RawCq q;
    RawAtom head = parse_raw_atom(lex);
    q.name = head.pred;
    q.free = head.args;
    lex.expect(":-");
    q.body.push_back(parse_raw_atom(lex));
    while (lex.peek().text == ",") {
        lex.take();
        q.body.push_back(parse_raw_atom(lex));
    }
    lex.expect(".");
    return q;
}

void register_atom(Signature& sig, const RawAtom& a) {
    sig.add_predicate(a.pred.text, int(a.args.size()));
    for (const Token& t : a.args)
        if (!t.text.empty() && t.text.back() == '!') {
            if (!islower(uint8_t(t.text[0])))
                throw ParseError("constants must start with a lowercase letter: " + t.text, t.line,
                                 t.col);
            sig.add_constant(t.text);
        }
}

Atom build_atom(const Signature& sig, const RawAtom& a) {
    Atom out;
    out.pred = *sig.predicate(a.pred.text);
    for (const Token& t : a.args) out.args.push_back(term_of_ident(t));
    return out;
}

ConjunctiveQuery build_cq(SignaturePtr sig, const RawCq& raw) {
    ConjunctiveQuery q;
    q.name = raw.name.text;
    q.sig = std::move(sig);
    for (const Token& t : raw.free) {
        Term v = term_of_ident(t);
        if (!v.is_var())
            throw ParseError("constants never appear in the free-variable list", t.line, t.col);
        q.free_vars.push_back(v);
    }
    for (const RawAtom& a : raw.body) q.body.push_back(build_atom(*q.sig, a));
    try {
        q.validate();
    } catch (const Error& e) {
        throw ParseError(e.what(), raw.name.line, raw.name.col);
    }
    return q;
}

} // namespace

Program parse_program(const std::string& text) {
    Lexer lex(text);
    std::vector<RawCq> views;
    std::optional<RawCq> query;
    while (!lex.at_end()) {
        if (lex.peek().text == "query") {
            lex.take();
            lex.expect(":");
            query = parse_raw_cq(lex);
            break;
        }
        views.push_back(parse_raw_cq(lex));
    }
    if (!lex.at_end()) throw ParseError("trailing input after the query", lex.peek().line, 1);

    auto sig = std::make_shared<Signature>();
    for (const RawCq& q : views)
        for (const RawAtom& a : q.body) {
            try {
                register_atom(*sig, a);
            } catch (const Error& e) {
                throw ParseError(e.what(), a.pred.line, a.pred.col);
            }
        }
    if (query)
        for (const RawAtom& a : query->body) register_atom(*sig, a);

    Program p;
    p.sig = sig;
    for (const RawCq& q : views) p.views.push_back(build_cq(sig, q));
    if (query) p.query = build_cq(sig, *query);
    return p;
}

Structure parse_facts(const std::string& text, SignaturePtr sig) {
    Lexer lex(text);
    std::vector<RawAtom> atoms;
    while (!lex.at_end()) {
        atoms.push_back(parse_raw_atom(lex));
        lex.expect(".");
    }
    if (!sig) {
        auto inferred = std::make_shared<Signature>();
        for (const RawAtom& a : atoms) {
            try {
                register_atom(*inferred, a);
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                throw ParseError(e.what(), a.pred.line, a.pred.col);
            }
        }
        sig = inferred;
    }
    Structure d(sig);
    for (const RawAtom& a : atoms) {
        auto pred = sig->predicate(a.pred.text);
        if (!pred) throw ParseError("unknown predicate " + a.pred.text, a.pred.line, a.pred.col);
        Atom atom = build_atom(*sig, a);
        try {
            d.add_atom(atom);
        } catch (const Error& e) {
            throw ParseError(e.what(), a.pred.line, a.pred.col);
        }
    }
    return d;
}

std::string program_to_text(const Program& p) {
    std::ostringstream out;
    for (const ConjunctiveQuery& q : p.views) out << to_string(q) << "\n";
    if (p.query) out << "query: " << to_string(*p.query) << "\n";
    return out.str();
}

std::string facts_to_text(const Structure& d) {
    std::ostringstream out;
    for (const Atom& a : d.atoms()) out << to_string(a, *d.signature()) << ".\n";
    return out.str();
}

WordRoles parse_roles_items(const std::string& spec, int lineno) {
    WordRoles roles;
    std::istringstream ls(spec);
    std::string item;
    while (ls >> item) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("roles are name=letter pairs", lineno, 1);
        std::string name = item.substr(0, eq);
        int value = std::stoi(item.substr(eq + 1));
        if (name == "alpha")
            roles.alpha = value;
        else if (name == "beta0")
            roles.beta0 = value;
        else if (name == "beta1")
            roles.beta1 = value;
        else if (name == "eta0")
            roles.eta0 = value;
        else if (name == "eta1")
            roles.eta1 = value;
        else if (name == "gamma")
            roles.gamma = value;
        else if (name == "gammap")
            roles.gammap = value;
        else
            throw ParseError("unknown role " + name, lineno, 1);
    }
    return roles;
}

ParsedRuleset parse_ruleset(const std::string& text) {
    ParsedRuleset out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "world") {
            if (!(ls >> out.s)) throw ParseError("world needs a size", lineno, 1);
            continue;
        }
        if (word == "roles") {
            std::string rest;
            std::getline(ls, rest);
            out.roles = parse_roles_items(rest, lineno);
            continue;
        }
        if (word != "rule") throw ParseError("expected 'world', 'roles' or 'rule'", lineno, 1);
        std::string name;
        if (!(ls >> name)) throw ParseError("rule needs a name", lineno, 1);
        if (!name.empty() && name.back() == ':') name.pop_back();
        std::string first;
        if (!(ls >> first)) throw ParseError("rule needs a spider query", lineno, 1);
        SpiderQuery left = parse_spider_query(first);
        std::string op;
        if (!(ls >> op)) {
            out.unary.push_back({name, left});
            continue;
        }
        if (op == "assoc") throw ParseError("unary rules have no associate", lineno, 1);
        CombineMode mode;
        if (op == "wedge")
            mode = CombineMode::Wedge;
        else if (op == "vee")
            mode = CombineMode::Vee;
        else
            throw ParseError("expected 'wedge' or 'vee', found '" + op + "'", lineno, 1);
        std::string second;
        if (!(ls >> second)) throw ParseError("binary rule needs a right query", lineno, 1);
        BinaryQuery q{name, left, parse_spider_query(second), mode, std::nullopt};
        std::string kw;
        if (ls >> kw) {
            if (kw != "assoc") throw ParseError("expected 'assoc'", lineno, 1);
            std::string assoc;
            if (!(ls >> assoc)) throw ParseError("assoc needs a rule name", lineno, 1);
            q.assoc = assoc;
        }
        out.binary.push_back(std::move(q));
    }
    if (out.s < 1) throw ParseError("ruleset file needs a 'world <s>' line", 1, 1);
    return out;
}

std::string ruleset_to_text(int s, const std::vector<BinaryQuery>& binary,
                            const std::vector<std::pair<std::string, SpiderQuery>>& unary,
                            const std::optional<WordRoles>& roles) {
    std::ostringstream out;
    out << "world " << s << "\n";
    if (roles)
        out << "roles alpha=" << roles->alpha << " beta0=" << roles->beta0
            << " beta1=" << roles->beta1 << " eta0=" << roles->eta0 << " eta1=" << roles->eta1
            << " gamma=" << roles->gamma << " gammap=" << roles->gammap << "\n";
    for (const auto& [name, q] : unary) out << "rule " << name << ": " << to_string(q) << "\n";
    for (const BinaryQuery& q : binary) {
        out << "rule " << q.name << ": " << to_string(q.left)
            << (q.mode == CombineMode::Wedge ? " wedge " : " vee ") << to_string(q.right);
        if (q.assoc) out << " assoc " << *q.assoc;
        out << "\n";
    }
    return out.str();
}

ThueSystem parse_thue(const std::string& text) {
    ThueSystem ts;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_roles = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "alphabet") {
            if (!(ls >> ts.s)) throw ParseError("alphabet needs a size", lineno, 1);
        } else if (word == "roles") {
            std::string rest;
            std::getline(ls, rest);
            ts.roles = parse_roles_items(rest, lineno);
            have_roles = true;
        } else if (word == "prod") {
            Word lhs, rhs;
            std::string tok;
            bool arrow = false;
            while (ls >> tok) {
                if (tok == "<->") {
                    arrow = true;
                    continue;
                }
                (arrow ? rhs : lhs).push_back(std::stoi(tok));
            }
            if (!arrow || lhs.empty() || rhs.empty())
                throw ParseError("prod needs 'letters <-> letters'", lineno, 1);
            ts.productions.push_back({lhs, rhs});
        } else {
            throw ParseError("expected alphabet/roles/prod, found '" + word + "'", lineno, 1);
        }
    }
    if (ts.s < 1) throw ParseError("thue file needs an 'alphabet <s>' line", 1, 1);
    if (!have_roles) throw ParseError("thue file needs a 'roles' line", 1, 1);
    return ts;
}

std::string thue_to_text(const ThueSystem& ts) {
    std::ostringstream out;
    out << "alphabet " << ts.s << "\n";
    out << "roles alpha=" << ts.roles.alpha << " beta0=" << ts.roles.beta0
        << " beta1=" << ts.roles.beta1 << " eta0=" << ts.roles.eta0 << " eta1=" << ts.roles.eta1
        << " gamma=" << ts.roles.gamma << " gammap=" << ts.roles.gammap << "\n";
    for (const auto& [lhs, rhs] : ts.productions) {
        out << "prod";
        for (int l : lhs) out << " " << l;
        out << " <->";
        for (int r : rhs) out << " " << r;
        out << "\n";
    }
    return out.str();
}

Graph parse_graph(const std::string& text) {
    Graph g;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "vertices") {
            if (!(ls >> g.vertices)) throw ParseError("vertices needs a count", lineno, 1);
        } else if (word == "edge") {
            int a, b;
            if (!(ls >> a >> b)) throw ParseError("edge needs two endpoints", lineno, 1);
            g.edges.push_back({a, b});
        } else {
            throw ParseError("expected vertices/edge, found '" + word + "'", lineno, 1);
        }
    }
    try {
        g.validate();
    } catch (const Error& e) {
        throw ParseError(e.what(), lineno, 1);
    }
    return g;
}

std::string graph_to_text(const Graph& g) {
    std::ostringstream out;
    out << "vertices " << g.vertices << "\n";
    for (auto [a, b] : g.edges) out << "edge " << a << " " << b << "\n";
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

} // namespace grchase
