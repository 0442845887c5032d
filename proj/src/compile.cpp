#include "fuselage/compile.hpp"

#include "fuselage/analysis.hpp"

namespace fuselage {

namespace {

std::vector<Effect> lower_effects(const std::vector<dsl::AstEffect>& es)
{
    std::vector<Effect> out;
    for (const auto& e : es)
        out.push_back({e.kind, e.name.text, e.delta});
    return out;
}

} // namespace

StoryGraph lower(const dsl::Ast& ast)
{
    StoryGraph g;
    g.title = ast.title.text;
    g.version = kGraphFormatVersion;
    g.start = ast.start.text;
    for (const auto& m : ast.meters)
        g.meters.push_back({m.name.text, m.min, m.max, m.init});
    for (const auto& i : ast.items)
        g.items.push_back({i.name.text, i.label ? std::optional(i.label->text) : std::nullopt});
    for (const auto& f : ast.flags)
        g.flags.push_back(f.text);

    for (const auto& an : ast.nodes) {
        Node n;
        n.id = an.id.text;
        if (const auto* nar = std::get_if<dsl::AstNarration>(&an.body)) {
            NarrationBody b;
            for (const auto& p : nar->pages)
                b.pages.push_back(p.text);
            b.next = nar->next.text;
            b.effects = lower_effects(nar->effects);
            n.body = std::move(b);
        } else if (const auto* ch = std::get_if<dsl::AstChoice>(&an.body)) {
            ChoiceBody b;
            b.prompt = ch->prompt.text;
            for (const auto& ao : ch->options) {
                Option o;
                o.label = ao.label.text;
                for (const auto& ag : ao.guards) {
                    Guard gd{ag.kind, ag.name.text, Cmp::Equal, ag.value};
                    if (ag.kind == Guard::Kind::Meter)
                        gd.cmp = *cmp_from_string(ag.cmp);
                    o.guards.push_back(std::move(gd));
                }
                o.target = ao.target.text;
                o.effects = lower_effects(ao.effects);
                b.options.push_back(std::move(o));
            }
            n.body = std::move(b);
        } else if (const auto* mg = std::get_if<dsl::AstMiniGame>(&an.body)) {
            Diagnostics scratch;
            auto kind = mini_kind_from_string(mg->game.text);
            auto params = kind ? dsl::lower_params(*mg, *kind, scratch) : std::nullopt;
            if (!params)
                throw std::logic_error("lower() called on an unchecked Ast");
            n.body = MiniGameBody{std::move(*params), mg->success.text, mg->failure.text};
        } else if (const auto* end = std::get_if<dsl::AstEnding>(&an.body)) {
            n.body = EndingBody{*ending_kind_from_string(end->ending.text), end->text.text};
        }
        n.channel = an.channel ? *channel_from_string(an.channel->text) : default_channel(n.body);
        g.nodes.emplace(n.id, std::move(n));
    }
    return g;
}

CompileResult compile(std::string_view source, std::string file)
{
    CompileResult result;
    auto parsed = dsl::parse(source, std::move(file));
    result.diagnostics = std::move(parsed.diagnostics);
    if (!parsed.ast)
        return result;

    auto checked = dsl::check(*parsed.ast);
    result.diagnostics.insert(result.diagnostics.end(), checked.begin(), checked.end());
    if (has_errors(result.diagnostics))
        return result;

    StoryGraph graph = lower(*parsed.ast);
    auto invalid = graph_validate(graph);
    if (!invalid.empty()) {
        result.diagnostics.insert(result.diagnostics.end(), invalid.begin(), invalid.end());
        return result;
    }

    // Reachability analysis tracks items by presence only; that is exact
    // as long as no item that can be taken is ever given twice.
    try {
        for (const auto& item : analysis::inventory_abstraction_problems(graph)) {
            result.diagnostics.push_back({Severity::Error, "item-multiplicity",
                "item '" + item + "' can be given while already held and is also taken somewhere; "
                "give it at most once or stop taking it",
                std::nullopt, item});
        }
    } catch (const analysis::StateBudgetExceeded&) {
        result.diagnostics.push_back({Severity::Warning, "analysis-budget",
            "inventory check skipped: state budget exceeded", std::nullopt, {}});
    }
    if (has_errors(result.diagnostics))
        return result;

    result.graph = std::move(graph);
    return result;
}

} // namespace fuselage
