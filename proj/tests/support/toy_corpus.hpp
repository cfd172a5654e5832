#pragma once

#include <random>
#include <string>
#include <vector>

#include "json.hpp"

namespace qagen::testsupport {

// Template-language corpora in SQuAD v1.1 format. Facts are simple enough
// for the desk-scale models to learn, and every answer is a clean token
// span. Some answers carry two question phrasings so a single span maps to
// several gold questions.
class ToyCorpus {
 public:
  struct Options {
    int contexts = 10;
    int facts_per_context = 3;
    bool phrasing_variants = true;  // duplicate one fact with a second wording
    uint64_t seed = 0;
  };

  static std::string make_json(const Options& opt) {
    std::mt19937_64 rng(opt.seed);
    nlohmann::json paragraphs = nlohmann::json::array();
    for (int c = 0; c < opt.contexts; ++c) {
      std::string context;
      nlohmann::json qas = nlohmann::json::array();
      std::vector<int> subjects = pick_distinct(rng, names().size(), opt.facts_per_context);
      for (int f = 0; f < opt.facts_per_context; ++f) {
        const std::string& name = names()[subjects[f]];
        int kind = static_cast<int>(rng() % 3);
        std::string sentence, answer;
        std::vector<std::string> questions;
        if (kind == 0) {
          const std::string& city = cities()[rng() % cities().size()];
          sentence = name + " lives in " + city + " .";
          answer = city;
          questions = {"where does " + name + " live ?",
                       "which city does " + name + " live in ?"};
        } else if (kind == 1) {
          const std::string& year = years()[rng() % years().size()];
          sentence = name + " was born in " + year + " .";
          answer = year;
          questions = {"when was " + name + " born ?",
                       "in what year was " + name + " born ?"};
        } else {
          const std::string& object = objects()[rng() % objects().size()];
          sentence = "the " + object + " belongs to " + name + " .";
          answer = name;
          questions = {"who owns the " + object + " ?",
                       "who does the " + object + " belong to ?"};
        }
        int answer_start = static_cast<int>(context.size() + sentence.rfind(answer));
        if (!context.empty()) {
          context += " ";
          answer_start += 1;
        }
        context += sentence;
        qas.push_back({{"question", questions[rng() % 2]},
                       {"answers", {{{"text", answer}, {"answer_start", answer_start}}}}});
        if (opt.phrasing_variants && f == 0) {
          qas.push_back({{"question", questions[1]},
                         {"answers", {{{"text", answer}, {"answer_start", answer_start}}}}});
        }
      }
      paragraphs.push_back({{"context", context}, {"qas", qas}});
    }
    nlohmann::json root{{"data", {{{"title", "toy"}, {"paragraphs", paragraphs}}}}};
    return root.dump(1);
  }

 private:
  static std::vector<int> pick_distinct(std::mt19937_64& rng, size_t pool, int n) {
    std::vector<int> out;
    while (static_cast<int>(out.size()) < n) {
      int v = static_cast<int>(rng() % pool);
      bool seen = false;
      for (int o : out) seen = seen || o == v;
      if (!seen) out.push_back(v);
    }
    return out;
  }

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> v = {"alice", "bob",   "carol", "david", "emma",
                                               "frank", "grace", "henry", "irene", "jack",
                                               "karen", "liam",  "mary",  "noah",  "olivia",
                                               "peter", "quinn", "rosa",  "sam",   "tina"};
    return v;
  }
  static const std::vector<std::string>& cities() {
    static const std::vector<std::string> v = {"paris",  "london", "berlin", "madrid", "rome",
                                               "vienna", "oslo",   "dublin", "prague", "lisbon"};
    return v;
  }
  static const std::vector<std::string>& years() {
    static const std::vector<std::string> v = {"1984", "1990", "1967", "2003", "1978",
                                               "1999", "2011", "1950", "1971", "2016"};
    return v;
  }
  static const std::vector<std::string>& objects() {
    static const std::vector<std::string> v = {"lamp",   "book",  "violin", "bicycle", "kettle",
                                               "garden", "piano", "boat",   "camera",  "clock"};
    return v;
  }
};

}  // namespace qagen::testsupport
