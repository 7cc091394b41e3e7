#ifndef KEYSCAN_PARTY_HPP
#define KEYSCAN_PARTY_HPP

#include <map>
#include <string>

namespace keyscan {

enum class Party {
    First,
    Third,
    ExcludedObfuscated,
    Withheld,  // developer metadata missing for a referencing app
};

std::string to_string(Party p);
Party party_from_string(const std::string& s);

// package name -> classification
using PartyMap = std::map<std::string, Party>;

}  // namespace keyscan

#endif
