#include "encoding_corpus.hpp"

namespace testing_support {

// Branch and jump operands are byte offsets from the instruction itself.
const std::vector<EncodingCase> kEncodingCorpus = {
    {"lui x5, 0x12345", "lui", 5, 0, 0, 0x12345},
    {"lui x31, 0xfffff", "lui", 31, 0, 0, 0xfffff},
    {"auipc x1, 0x80000", "auipc", 1, 0, 0, 0x80000},
    {"jal x1, 2048", "jal", 1, 0, 0, 2048},
    {"jal x0, -1048576", "jal", 0, 0, 0, -1048576},
    {"jalr x1, 8(x5)", "jalr", 1, 5, 0, 8},
    {"jalr x0, -2048(x31)", "jalr", 0, 31, 0, -2048},
    {"beq x1, x2, 16", "beq", 0, 1, 2, 16},
    {"bne x3, x4, -4096", "bne", 0, 3, 4, -4096},
    {"blt x5, x6, 4092", "blt", 0, 5, 6, 4092},
    {"bge x7, x8, -4", "bge", 0, 7, 8, -4},
    {"bltu x9, x10, 2048", "bltu", 0, 9, 10, 2048},
    {"bgeu x11, x12, 8", "bgeu", 0, 11, 12, 8},
    {"lb x1, -1(x2)", "lb", 1, 2, 0, -1},
    {"lh x3, 2(x4)", "lh", 3, 4, 0, 2},
    {"lw x5, 2047(x6)", "lw", 5, 6, 0, 2047},
    {"ld x7, -2048(x8)", "ld", 7, 8, 0, -2048},
    {"lbu x9, 0(x10)", "lbu", 9, 10, 0, 0},
    {"lhu x11, 100(x12)", "lhu", 11, 12, 0, 100},
    {"lwu x13, -100(x14)", "lwu", 13, 14, 0, -100},
    {"sb x1, -1(x2)", "sb", 0, 2, 1, -1},
    {"sh x3, 2046(x4)", "sh", 0, 4, 3, 2046},
    {"sw x5, -2048(x6)", "sw", 0, 6, 5, -2048},
    {"sd x7, 40(x8)", "sd", 0, 8, 7, 40},
    {"addi x1, x2, -2048", "addi", 1, 2, 0, -2048},
    {"slti x3, x4, 2047", "slti", 3, 4, 0, 2047},
    {"sltiu x5, x6, -1", "sltiu", 5, 6, 0, -1},
    {"xori x7, x8, 0x555", "xori", 7, 8, 0, 0x555},
    {"ori x9, x10, -256", "ori", 9, 10, 0, -256},
    {"andi x11, x12, 255", "andi", 11, 12, 0, 255},
    {"slli x13, x14, 63", "slli", 13, 14, 0, 63},
    {"srli x15, x16, 32", "srli", 15, 16, 0, 32},
    {"srai x17, x18, 1", "srai", 17, 18, 0, 1},
    {"add x1, x2, x3", "add", 1, 2, 3, 0},
    {"sub x4, x5, x6", "sub", 4, 5, 6, 0},
    {"sll x7, x8, x9", "sll", 7, 8, 9, 0},
    {"slt x10, x11, x12", "slt", 10, 11, 12, 0},
    {"sltu x13, x14, x15", "sltu", 13, 14, 15, 0},
    {"xor x16, x17, x18", "xor", 16, 17, 18, 0},
    {"srl x19, x20, x21", "srl", 19, 20, 21, 0},
    {"sra x22, x23, x24", "sra", 22, 23, 24, 0},
    {"or x25, x26, x27", "or", 25, 26, 27, 0},
    {"and x28, x29, x30", "and", 28, 29, 30, 0},
    {"addiw x1, x2, -1", "addiw", 1, 2, 0, -1},
    {"slliw x3, x4, 31", "slliw", 3, 4, 0, 31},
    {"srliw x5, x6, 7", "srliw", 5, 6, 0, 7},
    {"sraiw x7, x8, 31", "sraiw", 7, 8, 0, 31},
    {"addw x9, x10, x11", "addw", 9, 10, 11, 0},
    {"subw x12, x13, x14", "subw", 12, 13, 14, 0},
    {"sllw x15, x16, x17", "sllw", 15, 16, 17, 0},
    {"srlw x18, x19, x20", "srlw", 18, 19, 20, 0},
    {"sraw x21, x22, x23", "sraw", 21, 22, 23, 0},
    {"ecall", "ecall", 0, 0, 0, 0},
    {"ebreak", "ebreak", 0, 0, 0, 0},
    {"mul x1, x2, x3", "mul", 1, 2, 3, 0},
    {"mulh x4, x5, x6", "mulh", 4, 5, 6, 0},
    {"mulhsu x7, x8, x9", "mulhsu", 7, 8, 9, 0},
    {"mulhu x10, x11, x12", "mulhu", 10, 11, 12, 0},
    {"div x13, x14, x15", "div", 13, 14, 15, 0},
    {"divu x16, x17, x18", "divu", 16, 17, 18, 0},
    {"rem x19, x20, x21", "rem", 19, 20, 21, 0},
    {"remu x22, x23, x24", "remu", 22, 23, 24, 0},
    {"mulw x25, x26, x27", "mulw", 25, 26, 27, 0},
    {"divw x28, x29, x30", "divw", 28, 29, 30, 0},
    {"divuw x31, x1, x2", "divuw", 31, 1, 2, 0},
    {"remw x3, x4, x5", "remw", 3, 4, 5, 0},
    {"remuw x6, x7, x8", "remuw", 6, 7, 8, 0},
    {"add a0, sp, ra", "add", 10, 2, 1, 0},
    {"sd s0, 0(fp)", "sd", 0, 8, 8, 0},
};

}  // namespace testing_support
