#include <gtest/gtest.h>

#include "scenerule/rule_lang.hpp"
#include "test_support.hpp"

using namespace scenerule;
using scenerule::testing::data_path;
using scenerule::testing::read_text;

namespace {

SourcePos error_pos(const std::string& text) {
  try {
    parse_rules(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), Stage::rules);
    return e.pos();
  }
  ADD_FAILURE() << "expected a parse error for: " << text;
  return {};
}

DomainModel battle_domain() { return parse_domain(read_text(data_path("battle/domain.pl"))); }

}  // namespace

TEST(ParseRules, Warrior) {
  auto rs = parse_rules("rule('Warrior',[X,Y]){ Human(X); Sword(Y); horizontal(X,Y); }");
  ASSERT_EQ(rs.rules.size(), 1u);
  const auto& r = rs.rules[0];
  EXPECT_EQ(r.head, "Warrior");
  EXPECT_EQ(std::get<VarList>(r.binder).names, (std::vector<std::string>{"X", "Y"}));
  ASSERT_EQ(r.constraints.size(), 3u);
  EXPECT_EQ(std::get<InterpretationCheck>(r.constraints[0].branches[0]), (InterpretationCheck{"X", "Human"}));
  EXPECT_EQ(std::get<Property>(r.constraints[2].branches[0]).kind, PropertyKind::horizontal);
  EXPECT_TRUE(rs.warnings.empty());
}

TEST(ParseRules, Disjunction) {
  auto rs = parse_rules(
      "rule('HG_Giving_Birth_BG',[X,Y]){ High_Goddess(X); Bull_God(Y); "
      "(vertical(X,Y) or near(X,Y) or overlap(X,Y)) }");
  ASSERT_EQ(rs.rules.size(), 1u);
  const auto& c = rs.rules[0].constraints.back();
  EXPECT_TRUE(c.is_disjunction());
  EXPECT_EQ(c.branches.size(), 3u);
}

TEST(ParseRules, GroupBinder) {
  auto rs = parse_rules("rule('Group_Of_Corniforms', group(Xs:'Corniform', maximal)) { relGroup(Xs, 0.5) }");
  const auto& g = std::get<GroupBinder>(rs.rules[0].binder);
  EXPECT_EQ(g.var, "Xs");
  EXPECT_EQ(g.member_interpretation, "Corniform");
  EXPECT_EQ(g.mode, GroupMode::maximal);
  auto sub = parse_rules("rule('Bull_God', group(Xs:'Corniform', subsets)) { vertical(Xs) }");
  EXPECT_EQ(std::get<GroupBinder>(sub.rules[0].binder).mode, GroupMode::subsets);
}

TEST(ParseRules, PropertyArguments) {
  auto rs = parse_rules(
      "% comment\nrule('A',[X,Y]){ vertical(X,Y,'up'); diagonal(Y,X,ne); relNear(X,Y,0.5); kindOf(Y,'W') }");
  const auto& cs = rs.rules[0].constraints;
  const auto& v = std::get<Property>(cs[0].branches[0]);
  EXPECT_EQ(std::get<SymbolArg>(v.args[2]).value, "up");
  const auto& d = std::get<Property>(cs[1].branches[0]);
  EXPECT_EQ(std::get<SymbolArg>(d.args[2]).value, "ne");
  const auto& n = std::get<Property>(cs[2].branches[0]);
  EXPECT_EQ(n.kind, PropertyKind::rel_near);
  EXPECT_DOUBLE_EQ(std::get<double>(n.args[2]), 0.5);
  EXPECT_EQ(std::get<KindOf>(cs[3].branches[0]), (KindOf{"Y", "W"}));
}

TEST(ParseRules, Errors) {
  EXPECT_EQ(error_pos("rule('Broken',[X]){ fly(X); }").column, 21u);
  EXPECT_EQ(error_pos("rule('A',[X]){\n  Human(Y); }").line, 2u);
  error_pos("rule('A',[X,X]){ Human(X) }");
  error_pos("rule('A',[x]){ Human(x) }");
  error_pos("rule('A',[X,Y]){ near(X,Y,'far') }");
  error_pos("rule('A',[X,Y]){ relNear(X,Y,2.0) }");
  error_pos("rule('A',[X,Y]){ vertical(X,Y,'left') }");
  error_pos("rule('A',[X,Y]){ overlap(X) }");
  error_pos("rule('A',[X]){ relGroup(X, 0.5) }");
  error_pos("rule('A', group(Xs:'B')){ near(Xs, Xs) }");
  error_pos("rule('A', group(Xs:'B', some)){ relGroup(Xs, 0.5) }");
  error_pos("rule('A',[X]){ Human(X) Human(X) }");
  error_pos("rule('A',[X]){ Human(X); ");
  error_pos("rule('A',[X]){ (Human(X) or) }");
}

TEST(ParseRules, Warnings) {
  auto unused = parse_rules("rule('A',[X,Y]){ Human(X) }");
  ASSERT_EQ(unused.warnings.size(), 1u);
  EXPECT_NE(unused.warnings[0].find("Y"), std::string::npos);
  auto dup = parse_rules("rule('A',[X]){ Human(X) }\nrule('A',[X]){ Human(X); }");
  EXPECT_EQ(dup.rules.size(), 1u);
  EXPECT_EQ(dup.warnings.size(), 1u);
}

TEST(ParseRules, DefaultsAndAliases) {
  auto rs = parse_rules("rule('A',[X,Y]){ near(X,Y); absNear(X,Y); relNear(X,Y) }");
  EXPECT_EQ(std::get<Property>(rs.rules[0].constraints[0].branches[0]).kind, PropertyKind::near);
  EXPECT_EQ(rs.rules[0].constraints.size(), 3u);
}

TEST(ValidateRules, Examples) {
  const auto m = battle_domain();
  EXPECT_TRUE(validate_rules(parse_rules("rule('Warrior',[X,Y]){ Human(X); Sword(Y); horizontal(X,Y) }"), m)
                  .empty());
  const auto dragon = validate_rules(parse_rules("rule('Hunt',[X,Y]){ Human(X); Dragon(Y); near(X,Y) }"), m);
  ASSERT_EQ(dragon.size(), 1u);
  EXPECT_EQ(dragon[0].severity, Severity::warning);
  EXPECT_TRUE(validate_rules(parse_rules("rule('W',[X,Y]){ Human(X); kindOf(Y,'Weapon_Class') }"), m).empty());
  EXPECT_EQ(validate_rules(parse_rules("rule('W',[X,Y]){ Human(X); kindOf(Y,'Armor_Class') }"), m).size(), 1u);
  // Heads of other rules count as producers.
  EXPECT_TRUE(validate_rules(parse_rules(read_text(data_path("battle/battle.rules"))), m).empty());
}

TEST(RuleLangProperties, PrintParseRoundTrip) {
  for (const char* path : {"battle/battle.rules", "battle/war.rules", "rockart/rockart.rules"}) {
    const auto rs = parse_rules(read_text(data_path(path)));
    const auto printed = print_rules(rs);
    const auto again = parse_rules(printed);
    ASSERT_EQ(again.rules.size(), rs.rules.size()) << path;
    for (std::size_t i = 0; i < rs.rules.size(); ++i) EXPECT_EQ(again.rules[i], rs.rules[i]) << path;
    EXPECT_EQ(print_rules(again), printed);
  }
}

TEST(RuleLangProperties, RockArtPackValidatesCleanly) {
  const auto rs = parse_rules(read_text(data_path("rockart/rockart.rules")));
  EXPECT_TRUE(rs.warnings.empty());
  const auto model = parse_domain(read_text(data_path("rockart/domain.pl")));
  EXPECT_TRUE(validate_rules(rs, model).empty());
  std::set<std::string> heads;
  for (const auto& r : rs.rules) heads.insert(r.head);
  EXPECT_EQ(heads, (std::set<std::string>{"Group_Of_Corniforms", "Ritual_Sacrifice", "HG_Giving_Birth_BG",
                                          "Storm_God", "Rain_Summon", "Queens_Fight", "Bull_God",
                                          "Rain_Propitiatory_Rite", "Agricultural_Rite"}));
}
