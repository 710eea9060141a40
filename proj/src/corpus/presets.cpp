#include "graphdst/errors.hpp"
#include "graphdst/schema.hpp"

namespace gdst {

namespace {

using Pools = std::map<Schema::PairName, std::vector<std::string>>;

const std::vector<std::string> kAreas = {"north", "south", "east", "west", "centre"};
const std::vector<std::string> kDays = {"monday", "tuesday", "wednesday", "thursday",
                                        "friday", "saturday", "sunday"};
const std::vector<std::string> kTimes = {"09:15", "10:30", "11:45", "12:00", "13:30",
                                         "15:00", "17:45", "18:30", "19:15", "20:00"};
const std::vector<std::string> kHotels = {
    "acorn house",  "alexander b b", "city centre north", "el shaddai", "gonville hotel",
    "hamilton lodge", "lovell lodge", "warkworth house", "cityroomz",   "the cambridge belfry",
    "allenbell",    "aylesbray lodge"};
const std::vector<std::string> kRestaurants = {
    "curry garden", "pizza hut city", "the golden wok", "bedouin",     "nandos",
    "meghna",       "la margherita",  "royal spice",    "saigon city", "the copper kettle",
    "midsummer house", "graffiti"};
const std::vector<std::string> kAttractions = {
    "kings college", "the fitzwilliam museum", "castle galleries", "jesus green",
    "byard art",     "cherry hinton hall",     "whipple museum",   "scudamores punting",
    "the place",     "ruskin gallery"};
const std::vector<std::string> kStations = {
    "cambridge", "london kings cross", "norwich", "ely", "stansted airport", "peterborough",
    "leicester", "birmingham new street", "broxbourne", "stevenage"};
const std::vector<std::string> kFood = {"chinese", "indian",  "italian", "modern european",
                                        "british", "thai",    "french",  "japanese",
                                        "korean",  "spanish", "gastropub"};

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

Schema default_schema() {
  std::vector<std::string> domains = {"hotel", "restaurant", "train", "taxi"};
  std::map<std::string, std::vector<std::string>> slots = {
      {"hotel", {"name", "area", "stars", "parking"}},
      {"restaurant", {"name", "food", "time"}},
      {"train", {"departure", "destination", "day"}},
      {"taxi", {"departure", "arriveby"}},
  };
  Pools values = {
      {{"hotel", "name"}, kHotels},
      {{"hotel", "area"}, kAreas},
      {{"hotel", "stars"}, {"1", "2", "3", "4", "5"}},
      {{"hotel", "parking"}, {"yes", "no", "free"}},
      {{"restaurant", "name"}, kRestaurants},
      {{"restaurant", "food"}, kFood},
      {{"restaurant", "time"}, kTimes},
      {{"train", "departure"}, kStations},
      {{"train", "destination"}, kStations},
      {{"train", "day"}, kDays},
      {{"taxi", "departure"}, concat({kHotels, kRestaurants})},
      {{"taxi", "arriveby"}, kTimes},
  };
  // Train <-> hotel and restaurant -> taxi chains dominate.
  std::map<Schema::PairName, double> trans = {
      {{"hotel", "hotel"}, 1.0},      {{"hotel", "train"}, 3.0},
      {{"hotel", "restaurant"}, 1.5}, {{"hotel", "taxi"}, 1.0},
      {{"train", "train"}, 1.0},      {{"train", "hotel"}, 3.0},
      {{"train", "restaurant"}, 1.0}, {{"restaurant", "restaurant"}, 1.0},
      {{"restaurant", "taxi"}, 3.0},  {{"restaurant", "hotel"}, 1.0},
      {{"taxi", "taxi"}, 1.0},        {{"taxi", "hotel"}, 1.0},
      {{"taxi", "restaurant"}, 1.0},
  };
  return Schema(domains, slots, values, trans);
}

Schema full_scale_schema() {
  std::vector<std::string> domains = {"attraction", "hotel", "restaurant", "taxi", "train"};
  std::map<std::string, std::vector<std::string>> slots = {
      {"attraction", {"area", "name", "type"}},
      {"hotel",
       {"area", "book_day", "book_people", "book_stay", "internet", "name", "parking",
        "pricerange", "stars", "type"}},
      {"restaurant", {"area", "book_day", "book_people", "book_time", "food", "name", "pricerange"}},
      {"taxi", {"arriveby", "departure", "destination", "leaveat"}},
      {"train", {"arriveby", "book_people", "day", "departure", "destination", "leaveat"}},
  };
  const std::vector<std::string> people = {"1", "2", "3", "4", "5", "6", "7", "8"};
  const std::vector<std::string> price = {"cheap", "moderate", "expensive"};
  const std::vector<std::string> yesno = {"yes", "no", "free"};
  const std::vector<std::string> places = concat({kHotels, kRestaurants, kAttractions});
  Pools values = {
      {{"attraction", "area"}, kAreas},
      {{"attraction", "name"}, kAttractions},
      {{"attraction", "type"}, {"museum", "college", "park", "boat", "theatre", "architecture"}},
      {{"hotel", "area"}, kAreas},
      {{"hotel", "book_day"}, kDays},
      {{"hotel", "book_people"}, people},
      {{"hotel", "book_stay"}, {"1", "2", "3", "4", "5"}},
      {{"hotel", "internet"}, yesno},
      {{"hotel", "name"}, kHotels},
      {{"hotel", "parking"}, yesno},
      {{"hotel", "pricerange"}, price},
      {{"hotel", "stars"}, {"0", "1", "2", "3", "4", "5"}},
      {{"hotel", "type"}, {"hotel", "guesthouse"}},
      {{"restaurant", "area"}, kAreas},
      {{"restaurant", "book_day"}, kDays},
      {{"restaurant", "book_people"}, people},
      {{"restaurant", "book_time"}, kTimes},
      {{"restaurant", "food"}, kFood},
      {{"restaurant", "name"}, kRestaurants},
      {{"restaurant", "pricerange"}, price},
      {{"taxi", "arriveby"}, kTimes},
      {{"taxi", "departure"}, places},
      {{"taxi", "destination"}, places},
      {{"taxi", "leaveat"}, kTimes},
      {{"train", "arriveby"}, kTimes},
      {{"train", "book_people"}, people},
      {{"train", "day"}, kDays},
      {{"train", "departure"}, kStations},
      {{"train", "destination"}, kStations},
      {{"train", "leaveat"}, kTimes},
  };
  std::map<Schema::PairName, double> trans = {
      {{"attraction", "attraction"}, 1.0}, {{"attraction", "restaurant"}, 2.0},
      {{"attraction", "hotel"}, 1.0},      {{"attraction", "taxi"}, 2.0},
      {{"hotel", "hotel"}, 1.0},           {{"hotel", "train"}, 3.0},
      {{"hotel", "restaurant"}, 1.5},      {{"hotel", "attraction"}, 1.0},
      {{"hotel", "taxi"}, 1.0},            {{"restaurant", "restaurant"}, 1.0},
      {{"restaurant", "taxi"}, 3.0},       {{"restaurant", "hotel"}, 1.0},
      {{"restaurant", "attraction"}, 1.0}, {{"taxi", "taxi"}, 1.0},
      {{"taxi", "hotel"}, 1.0},            {{"taxi", "restaurant"}, 1.0},
      {{"train", "train"}, 1.0},           {{"train", "hotel"}, 3.0},
      {{"train", "attraction"}, 1.0},      {{"train", "restaurant"}, 1.0},
  };
  return Schema(domains, slots, values, trans);
}

Schema linked_value_schema() {
  std::vector<std::string> domains = {"hotel", "restaurant", "attraction", "taxi"};
  std::map<std::string, std::vector<std::string>> slots = {
      {"hotel", {"name", "area", "stars"}},
      {"restaurant", {"name", "food", "area"}},
      {"attraction", {"name", "area"}},
      {"taxi", {"departure", "destination", "arriveby"}},
  };
  const std::vector<std::string> places = concat({kHotels, kRestaurants, kAttractions});
  Pools values = {
      {{"hotel", "name"}, kHotels},
      {{"hotel", "area"}, kAreas},
      {{"hotel", "stars"}, {"1", "2", "3", "4", "5"}},
      {{"restaurant", "name"}, kRestaurants},
      {{"restaurant", "food"}, kFood},
      {{"restaurant", "area"}, kAreas},
      {{"attraction", "name"}, kAttractions},
      {{"attraction", "area"}, kAreas},
      {{"taxi", "departure"}, places},
      {{"taxi", "destination"}, places},
      {{"taxi", "arriveby"}, kTimes},
  };
  std::map<Schema::PairName, double> trans = {
      {{"hotel", "restaurant"}, 1.0},      {{"hotel", "attraction"}, 1.0},
      {{"hotel", "taxi"}, 1.0},            {{"restaurant", "hotel"}, 1.0},
      {{"restaurant", "attraction"}, 1.0}, {{"restaurant", "taxi"}, 1.0},
      {{"attraction", "hotel"}, 1.0},      {{"attraction", "restaurant"}, 1.0},
      {{"attraction", "taxi"}, 1.0},       {{"taxi", "hotel"}, 1.0},
      {{"taxi", "restaurant"}, 1.0},       {{"taxi", "attraction"}, 1.0},
  };
  const std::vector<Schema::PairName> venues = {
      {"hotel", "name"}, {"restaurant", "name"}, {"attraction", "name"}};
  std::vector<std::pair<Schema::PairName, std::vector<Schema::PairName>>> links = {
      {{"taxi", "departure"}, venues},
      {{"taxi", "destination"}, venues},
  };
  return Schema(domains, slots, values, trans, links);
}

Schema preset_schema(const std::string& name) {
  if (name == "default") return default_schema();
  if (name == "full") return full_scale_schema();
  if (name == "linked") return linked_value_schema();
  throw Error("unknown schema preset '" + name + "' (expected default, full or linked)");
}

}  // namespace gdst
