// Copyright 2026 The Truecase Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRUECASE_TESTS_SYNTHETIC_CORPUS_H_
#define TRUECASE_TESTS_SYNTHETIC_CORPUS_H_

// Seeded generator of cased English-like text: sentence-initial capitals,
// personal and place names, acronyms, and words whose case depends on
// context ("the bill" / "with Bill", "in May" / "we may").

#include <string>
#include <vector>

#include "truecase/random.h"

namespace truecase {
namespace testing {

class SyntheticCorpus {
 public:
  explicit SyntheticCorpus(uint64_t seed) : rng_(MixSeed(seed, 0xc0de)) {}

  std::vector<std::string> Lines(size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      std::string line = Sentence();
      if (rng_.Bernoulli(0.4)) line += " " + Sentence();
      out.push_back(std::move(line));
    }
    return out;
  }

 private:
  const std::string& Pick(const std::vector<std::string>& words) {
    return words[rng_.Below(words.size())];
  }

  std::string Name() {
    return rng_.Bernoulli(0.3) ? Pick(kAmbiguousNames) : Pick(kNames);
  }
  std::string Noun() {
    return rng_.Bernoulli(0.25) ? Pick(kAmbiguousNouns) : Pick(kNouns);
  }
  std::string Place() {
    return rng_.Bernoulli(0.2) ? Pick(kAmbiguousPlaces) : Pick(kPlaces);
  }

  std::string Sentence() {
    switch (rng_.Below(11)) {
      case 0:
        return Name() + " " + Pick(kVerbs) + " the " + Pick(kAdjectives) + " " +
               Noun() + " in " + Place() + ".";
      case 1:
        return "The " + Noun() + " was " + Pick(kVerbs) + " by " + Name() +
               " on " + Pick(kDays) + ".";
      case 2:
        return Pick(kStarters) + " we " + Pick(kVerbs) + " " + Name() +
               " at the " + Noun() + ".";
      case 3:
        return "They " + Pick(kVerbs) + " a " + Pick(kAdjectives) + " " +
               Noun() + " from " + Pick(kOrgs) + ".";
      case 4:
        return Name() + " and " + Name() + " " + Pick(kVerbs) + " the " +
               Noun() + " in " + Pick(kMonths) + ".";
      case 5:
        return Pick(kTitles) + " " + Pick(kSurnames) + " " + Pick(kVerbs) +
               " the " + Noun() + " with " + Name() + ".";
      case 6:
        return "After the " + Noun() + ", " + Name() + " went to " + Place() +
               ".";
      case 7:
        return "We " + Pick(kVerbs) + " the " + Noun() + " and the " + Noun() +
               ".";
      case 8:
        return "In " + Pick(kMonths) + " the " + Pick(kOrgs) + " " +
               Pick(kVerbs) + " " + Place() + ".";
      case 9:
        return Pick(kPronouns) + " " + Pick(kModals) + " " + Pick(kBareVerbs) +
               " the " + Noun() + " on " + Pick(kDays) + ".";
      default:
        return "Did " + Name() + " " + Pick(kBareVerbs) + " the " +
               Pick(kAdjectives) + " " + Noun() + "?";
    }
  }

  Rng rng_;

  const std::vector<std::string> kNames = {
      "Anna", "Tom", "Maria", "Peter", "Lucy", "Daniel", "Sarah", "Oliver",
      "Emma", "Henry", "Kate", "Victor", "Nora", "Julia", "Sam", "Ben",
      "Lily", "Max", "Chen", "Priya", "Omar", "Elena", "Hugo", "Ingrid"};
  const std::vector<std::string> kAmbiguousNames = {
      "Bill", "Mark", "Rose", "Jack", "Grace", "Will", "Amber", "Frank"};
  const std::vector<std::string> kSurnames = {
      "Patel", "Garcia", "Smith", "Brown", "Green", "Novak", "Kim", "Okafor"};
  const std::vector<std::string> kTitles = {"Dr.", "Mr.", "Mrs.", "Prof."};
  const std::vector<std::string> kPlaces = {
      "Paris", "London", "Berlin", "Tokyo", "Madrid", "Boston", "Chicago",
      "Dublin", "Vienna", "Rome", "Cairo", "Lima", "Oslo", "France",
      "Canada", "Mexico", "Japan", "Brazil", "Kenya", "New York"};
  const std::vector<std::string> kAmbiguousPlaces = {"China", "Turkey",
                                                     "Jordan", "Nice"};
  const std::vector<std::string> kOrgs = {"NASA", "IBM", "the BBC", "the UN",
                                          "the EU", "MIT", "NATO", "UNESCO"};
  const std::vector<std::string> kDays = {"Monday", "Tuesday", "Friday",
                                          "Sunday", "Saturday"};
  const std::vector<std::string> kMonths = {"May", "March", "June", "April",
                                            "October", "January"};
  const std::vector<std::string> kNouns = {
      "dog", "cat", "book", "car", "letter", "report", "house", "garden",
      "meeting", "river", "train", "window", "bridge", "song", "market",
      "ticket", "picture", "lamp", "boat", "road"};
  const std::vector<std::string> kAmbiguousNouns = {
      "bill", "mark", "rose", "jack", "grace", "will", "amber", "china",
      "turkey"};
  const std::vector<std::string> kAdjectives = {
      "old", "new", "red", "small", "brown", "green", "quiet", "busy",
      "strange", "nice", "frank"};
  const std::vector<std::string> kVerbs = {
      "visited", "called", "met", "saw", "painted", "wrote", "read", "sold",
      "bought", "found", "liked", "left"};
  const std::vector<std::string> kBareVerbs = {"visit", "paint", "sell",
                                               "find", "read", "fix", "march"};
  const std::vector<std::string> kModals = {"may", "will", "must", "can"};
  const std::vector<std::string> kPronouns = {"We", "They", "You", "She",
                                              "He"};
  const std::vector<std::string> kStarters = {"Yesterday", "Later", "Today",
                                              "Then", "Once"};
};

}  // namespace testing
}  // namespace truecase

#endif  // TRUECASE_TESTS_SYNTHETIC_CORPUS_H_
