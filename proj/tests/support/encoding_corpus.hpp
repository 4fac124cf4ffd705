#pragma once

#include <cstdint>
#include <vector>

namespace testing_support {

struct EncodingCase {
  const char* source;
  const char* name;
  unsigned rd, rs1, rs2;
  int64_t imm;
};

/// Assembly lines with their expected fields, covering every catalog entry.
extern const std::vector<EncodingCase> kEncodingCorpus;

}  // namespace testing_support
