// Copyright 2026 The ea2e Authors
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

#pragma once

namespace ea2e {

// Reserved surface tokens. Sequence layout markers:
inline constexpr const char* kSeqStart = "<s>";
inline constexpr const char* kSeqEnd = "</s>";
// Template placeholder for a role slot with no extracted argument:
inline constexpr const char* kArgPlaceholder = "<arg>";
// Role tags wrapped around a role label, inserted in front of an argument
// span when a context is augmented:
inline constexpr const char* kTagOpen = "<tag>";
inline constexpr const char* kTagClose = "</tag>";
// Marker placed on both sides of the target event's trigger:
inline constexpr const char* kTriggerMark = "<trg>";
// Joiner between multiple fills of the same role slot:
inline constexpr const char* kFillJoin = "and";
// Fallback id for tokens outside a trained vocabulary:
inline constexpr const char* kUnknown = "<unk>";

}  // namespace ea2e
