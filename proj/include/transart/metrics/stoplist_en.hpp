#pragma once

// Default English function-word list used for lexical density: determiners,
// prepositions, pronouns, conjunctions, auxiliaries, particles and numerals.
// data/stoplist_en.txt carries the same entries, one per line.

#include <array>
#include <string>
#include <string_view>
#include <unordered_set>

namespace transart::metrics {

inline constexpr std::array<std::string_view, 303> kEnglishStoplist = {
    "'d", "'ll", "'m", "'re", "'s", "'ve", "a", "about", "above", "across", "after", "against",
    "ah", "ain't", "albeit", "along", "although", "am", "amid", "amidst", "among", "amongst", "an",
    "and", "another", "any", "anybody", "anyone", "anything", "anywhere", "are", "aren't", "around",
    "as", "at", "be", "because", "been", "before", "behind", "being", "below", "beneath", "beside",
    "besides", "between", "beyond", "both", "but", "by", "can", "can't", "cannot", "could",
    "couldn't", "dare", "did", "didn't", "do", "does", "doesn't", "doing", "don't", "done", "down",
    "during", "each", "eh", "eight", "either", "enough", "every", "everybody", "everyone",
    "everything", "everywhere", "few", "fewer", "first", "five", "for", "four", "from", "had",
    "hadn't", "has", "hasn't", "have", "haven't", "having", "he", "he'd", "he'll", "he's", "her",
    "here", "here's", "hereby", "herein", "hers", "herself", "him", "himself", "his", "how",
    "how's", "however", "i", "i'd", "i'll", "i'm", "i've", "if", "in", "inside", "into", "is",
    "isn't", "it", "it's", "its", "itself", "just", "least", "less", "let's", "like", "many", "may",
    "mayn't", "me", "might", "mightn't", "mine", "more", "most", "much", "must", "mustn't", "my",
    "myself", "n't", "near", "need", "needn't", "neither", "nine", "no", "nobody", "none", "noone",
    "nor", "not", "nothing", "of", "off", "oh", "ok", "okay", "on", "once", "one", "onto", "or",
    "other", "others", "otherwise", "ought", "oughtn't", "our", "ours", "ourselves", "out",
    "outside", "over", "own", "per", "please", "rather", "same", "second", "seven", "several",
    "shall", "shan't", "she", "she'd", "she'll", "she's", "should", "shouldn't", "since", "six",
    "so", "some", "somebody", "someone", "something", "somewhere", "such", "ten", "than", "that",
    "that's", "the", "their", "theirs", "them", "themselves", "then", "there", "there's", "thereby",
    "therein", "thereupon", "these", "they", "they'd", "they'll", "they're", "they've", "third",
    "this", "those", "though", "three", "through", "throughout", "thru", "till", "to", "too",
    "toward", "towards", "two", "uh", "um", "under", "underneath", "unless", "unlike", "until",
    "up", "upon", "us", "used", "versus", "via", "was", "wasn't", "we", "we'd", "we'll", "we're",
    "we've", "were", "weren't", "what", "what's", "whatever", "when", "when's", "whenever", "where",
    "where's", "whereas", "whereby", "wherein", "whereupon", "wherever", "whether", "which",
    "whichever", "while", "whilst", "who", "who's", "whoever", "whom", "whomever", "whose", "why",
    "why's", "will", "with", "within", "without", "won't", "would", "wouldn't", "yeah", "yes",
    "yet", "you", "you'd", "you'll", "you're", "you've", "your", "yours", "yourself", "yourselves",
    "zero",
};

inline const std::unordered_set<std::string>& default_stoplist() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> set;
    for (std::string_view w : kEnglishStoplist) set.emplace(w);
    return set;
  }();
  return words;
}

}  // namespace transart::metrics
