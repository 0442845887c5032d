#pragma once

#include "fuselage/diagnostic.hpp"
#include "fuselage/story.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Front end for the `.story` scripting language.
//
//   story "Title" start A-1
//   meter freewill min 0 max 100 init 100
//   item usb "USB drive"
//   flag recover
//   node A-1 narration { text "..." text "..." next A-2 set recover }
//   node A-2 choice { prompt "..." option "Go" if flag recover -> B give usb
//                                  option "Stay" -> END }
//   node B minigame scan channel handset {
//       params { width 4 height 3 target "2,1" decoy "0,0" budget 3 }
//       success -> END failure -> B }
//   node END ending main { text "..." }
//
// `#` starts a comment that runs to the end of the line.
namespace fuselage::dsl {

// Maximum number of errors reported for one file; parsing stops after it.
inline constexpr std::size_t kMaxErrorsPerFile = 20;

struct Name {
    std::string text;
    SourceSpan span;
};

struct StringLit {
    std::string text;
    SourceSpan span;
};

struct AstGuard {
    Guard::Kind kind = Guard::Kind::FlagSet;
    Name name;
    std::string cmp; // raw operator text for meter guards
    std::int64_t value = 0;
    SourceSpan span;
};

struct AstEffect {
    Effect::Kind kind = Effect::Kind::SetFlag;
    Name name;
    std::int64_t delta = 0;
    SourceSpan span;
};

struct AstOption {
    StringLit label;
    std::vector<AstGuard> guards;
    Name target;
    std::vector<AstEffect> effects;
};

struct ParamValue {
    enum class Type { String, Int, Ident };
    Type type = Type::String;
    std::string text;
    std::int64_t integer = 0;
    SourceSpan span;
};

struct AstParam {
    Name key;
    ParamValue value;
};

struct AstNarration {
    std::vector<StringLit> pages;
    Name next;
    std::vector<AstEffect> effects;
};

struct AstChoice {
    StringLit prompt;
    std::vector<AstOption> options;
};

struct AstMiniGame {
    Name game;
    SourceSpan params_span;
    std::vector<AstParam> params;
    Name success;
    Name failure;
};

struct AstEnding {
    Name ending;
    StringLit text;
};

struct AstNode {
    SourceSpan span; // the `node` keyword
    Name id;
    std::optional<Name> channel;
    std::variant<AstNarration, AstChoice, AstMiniGame, AstEnding> body;
};

struct AstMeter {
    Name name;
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::int64_t init = 0;
};

struct AstItem {
    Name name;
    std::optional<StringLit> label;
};

struct Ast {
    SourceSpan span; // the `story` keyword
    StringLit title;
    Name start;
    std::vector<AstMeter> meters;
    std::vector<AstItem> items;
    std::vector<Name> flags;
    std::vector<AstNode> nodes;
};

struct ParseResult {
    std::optional<Ast> ast; // present iff no errors
    Diagnostics diagnostics;
};

// Never throws; any input yields either an Ast or at least one error.
ParseResult parse(std::string_view source, std::string file = {});

// Name resolution and semantic checks. Errors block compilation, warnings
// (`unreachable-by-syntax`, `sequence-failure-unreachable`) do not.
Diagnostics check(const Ast& ast);

// Type-checks a `params { ... }` block against the schema of its mini-game
// kind and fills in defaults. Returns nullopt if any error was appended.
std::optional<MiniGameParams> lower_params(const AstMiniGame& mg, MiniKind kind, Diagnostics& out);

} // namespace fuselage::dsl
