#include "socialbot/activities.hpp"
#include "socialbot/mixed.hpp"
#include "socialbot/module.hpp"

namespace socialbot {

void register_builtin_modules(ModuleRegistry& registry, const Resources& resources) {
  registry.add(make_opinions_module());
  registry.add(make_question_answering_module());
  registry.add(make_retrieval_module());
  registry.add(make_story_module());
  registry.add(make_recursive_module(resources));
  registry.add(make_headlines_module(resources));
  registry.add(make_riddles_module());
  registry.add(make_wyr_module());
  registry.add(make_survey_module());
  registry.add(make_nim_module());
  registry.add(make_city_names_module());
  registry.add(make_jeopardy_module());
  registry.add(make_fast_money_module());
  registry.add(make_text_adventure_module());
}

}  // namespace socialbot
