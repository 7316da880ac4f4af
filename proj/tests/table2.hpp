#pragma once

#include <array>

namespace svaport::testkit {

/// Reference triggering probabilities and TPI values to two decimals, one
/// row per Trojan HW-T1 .. HW-T33.
struct Table2Row {
    int id;
    const char* module;
    double probability;
    double tpi;
};

inline constexpr std::array<Table2Row, 33> kTable2{{
    {1, "PMP", 1.91e-6, 5.72},      {2, "PMP", 3.125e-2, 1.50},     {3, "PMP", 2.117e-22, 21.67},
    {4, "PMP", 2.45e-4, 3.61},      {5, "PMP", 1.421e-14, 13.85},   {6, "PMP", 3.7e-9, 8.43},
    {7, "PMP", 3.725e-9, 8.43},     {8, "CSR", 1.25e-1, 0.90},      {9, "CSR", 2.5e-1, 0.60},
    {10, "CSR", 2.44e-4, 3.61},     {11, "CSR", 1.525e-5, 4.82},    {12, "CSR", 3.9e-5, 4.41},
    {13, "CSR", 2.44e-4, 3.61},     {14, "CSR", 1.164e-10, 9.94},   {15, "DO", 3.125e-2, 1.50},
    {16, "DO", 6.25e-2, 1.20},      {17, "DO", 2.5e-1, 0.60},       {18, "DO", 1.2e-1, 0.92},
    {19, "ETI", 7.8125e-3, 2.11},   {20, "ETI", 1.5625e-2, 1.81},   {21, "ETI", 1.56e-2, 1.81},
    {22, "ETI", 1.907e-6, 5.72},    {23, "ETI", 1.2e-1, 0.92},      {24, "ETI", 1.22e-4, 3.91},
    {25, "CF", 1.455e-11, 10.84},   {26, "CF", 2.91038e-11, 10.54}, {27, "CF", 3.9e-3, 2.41},
    {28, "CF", 3.9e-3, 2.41},       {29, "CF", 1.45e-11, 10.84},    {30, "CF", 2.91e-11, 10.54},
    {31, "CF", 1.25e-1, 0.90},      {32, "CF", 2.5e-1, 0.60},       {33, "CF", 2.5e-1, 0.60},
}};

}  // namespace svaport::testkit
