#include "pretty.hpp"

#include <sstream>

namespace fuselage::testing {

using namespace fuselage::dsl;

namespace {

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + '"';
}

void effects(std::ostream& out, const std::vector<AstEffect>& es)
{
    for (const auto& e : es) {
        switch (e.kind) {
        case Effect::Kind::SetFlag: out << "\n    set " << e.name.text; break;
        case Effect::Kind::ClearFlag: out << "\n    clear " << e.name.text; break;
        case Effect::Kind::GiveItem: out << "\n    give " << e.name.text; break;
        case Effect::Kind::TakeItem: out << "\n    take " << e.name.text; break;
        case Effect::Kind::MeterDelta:
            out << "\n    meter " << e.name.text << (e.delta < 0 ? " - " : " + ") << (e.delta < 0 ? -e.delta : e.delta);
            break;
        }
    }
}

} // namespace

std::string pretty(const Ast& ast)
{
    std::ostringstream out;
    out << "story " << quote(ast.title.text) << "\nstart " << ast.start.text << "\n\n";
    for (const auto& m : ast.meters)
        out << "meter " << m.name.text << " min " << m.min << " max " << m.max << " init " << m.init << "\n";
    for (const auto& i : ast.items)
        out << "item " << i.name.text << (i.label ? " " + quote(i.label->text) : "") << "\n";
    for (const auto& f : ast.flags)
        out << "flag " << f.text << "\n";
    for (const auto& n : ast.nodes) {
        out << "\nnode " << n.id.text << " ";
        std::visit([&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, AstNarration>) out << "narration";
            else if constexpr (std::is_same_v<T, AstChoice>) out << "choice";
            else if constexpr (std::is_same_v<T, AstMiniGame>) out << "minigame " << b.game.text;
            else out << "ending " << b.ending.text;
        }, n.body);
        if (n.channel)
            out << " channel " << n.channel->text;
        out << " {";
        std::visit([&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, AstNarration>) {
                for (const auto& p : b.pages)
                    out << "\n  text " << quote(p.text);
                out << "\n  next " << b.next.text;
                effects(out, b.effects);
            } else if constexpr (std::is_same_v<T, AstChoice>) {
                out << "\n  prompt " << quote(b.prompt.text);
                for (const auto& o : b.options) {
                    out << "\n  option " << quote(o.label.text);
                    for (const auto& g : o.guards) {
                        switch (g.kind) {
                        case Guard::Kind::FlagSet: out << " if flag " << g.name.text; break;
                        case Guard::Kind::FlagClear: out << " if ! flag " << g.name.text; break;
                        case Guard::Kind::ItemHeld: out << " if item " << g.name.text; break;
                        case Guard::Kind::Meter: out << " if meter " << g.name.text << " " << g.cmp << " " << g.value; break;
                        }
                    }
                    out << " -> " << o.target.text;
                    effects(out, o.effects);
                }
            } else if constexpr (std::is_same_v<T, AstMiniGame>) {
                out << "\n  params {";
                for (const auto& p : b.params) {
                    out << "\n    " << p.key.text << " ";
                    switch (p.value.type) {
                    case ParamValue::Type::String: out << quote(p.value.text); break;
                    case ParamValue::Type::Int: out << p.value.integer; break;
                    case ParamValue::Type::Ident: out << p.value.text; break;
                    }
                }
                out << "\n  }\n  success -> " << b.success.text << "\n  failure -> " << b.failure.text;
            } else {
                out << "\n  text " << quote(b.text.text);
            }
        }, n.body);
        out << "\n}\n";
    }
    return out.str();
}

namespace {

bool eq(const Name& a, const Name& b) { return a.text == b.text; }
bool eq(const StringLit& a, const StringLit& b) { return a.text == b.text; }

template <class T, class F>
bool all_eq(const std::vector<T>& a, const std::vector<T>& b, F f)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!f(a[i], b[i]))
            return false;
    return true;
}

bool eq_effect(const AstEffect& a, const AstEffect& b)
{
    return a.kind == b.kind && eq(a.name, b.name) && a.delta == b.delta;
}

bool eq_guard(const AstGuard& a, const AstGuard& b)
{
    return a.kind == b.kind && eq(a.name, b.name) && a.cmp == b.cmp && a.value == b.value;
}

bool eq_node(const AstNode& a, const AstNode& b)
{
    if (!eq(a.id, b.id) || a.channel.has_value() != b.channel.has_value() || a.body.index() != b.body.index())
        return false;
    if (a.channel && !eq(*a.channel, *b.channel))
        return false;
    if (const auto* x = std::get_if<AstNarration>(&a.body)) {
        const auto& y = std::get<AstNarration>(b.body);
        return all_eq(x->pages, y.pages, [](auto& p, auto& q) { return eq(p, q); }) && eq(x->next, y.next)
            && all_eq(x->effects, y.effects, eq_effect);
    }
    if (const auto* x = std::get_if<AstChoice>(&a.body)) {
        const auto& y = std::get<AstChoice>(b.body);
        return eq(x->prompt, y.prompt) && all_eq(x->options, y.options, [](const AstOption& p, const AstOption& q) {
            return eq(p.label, q.label) && all_eq(p.guards, q.guards, eq_guard) && eq(p.target, q.target)
                && all_eq(p.effects, q.effects, eq_effect);
        });
    }
    if (const auto* x = std::get_if<AstMiniGame>(&a.body)) {
        const auto& y = std::get<AstMiniGame>(b.body);
        return eq(x->game, y.game) && eq(x->success, y.success) && eq(x->failure, y.failure)
            && all_eq(x->params, y.params, [](const AstParam& p, const AstParam& q) {
                   return eq(p.key, q.key) && p.value.type == q.value.type && p.value.text == q.value.text
                       && p.value.integer == q.value.integer;
               });
    }
    const auto& x = std::get<AstEnding>(a.body);
    const auto& y = std::get<AstEnding>(b.body);
    return eq(x.ending, y.ending) && eq(x.text, y.text);
}

} // namespace

bool same_ast(const Ast& a, const Ast& b)
{
    return eq(a.title, b.title) && eq(a.start, b.start)
        && all_eq(a.meters, b.meters, [](const AstMeter& p, const AstMeter& q) {
               return eq(p.name, q.name) && p.min == q.min && p.max == q.max && p.init == q.init;
           })
        && all_eq(a.items, b.items, [](const AstItem& p, const AstItem& q) {
               return eq(p.name, q.name) && p.label.has_value() == q.label.has_value() && (!p.label || eq(*p.label, *q.label));
           })
        && all_eq(a.flags, b.flags, [](const Name& p, const Name& q) { return eq(p, q); })
        && all_eq(a.nodes, b.nodes, eq_node);
}

} // namespace fuselage::testing
