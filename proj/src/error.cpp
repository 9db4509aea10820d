// Copyright 2026 The Cellstore Authors
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

#include "cellstore/error.hpp"

namespace cellstore {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingConcept: return "MissingConcept";
    case ErrorCode::EmptyAspects: return "EmptyAspects";
    case ErrorCode::BadCanonicalForm: return "BadCanonicalForm";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::StorageFull: return "StorageFull";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::NoRangeIndex: return "NoRangeIndex";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingConceptDimension: return "MissingConceptDimension";
    case ErrorCode::EmptyEnumeration: return "EmptyEnumeration";
    case ErrorCode::DefaultOutsideRange: return "DefaultOutsideRange";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::AspectMismatch: return "AspectMismatch";
    case ErrorCode::ResultTooLarge: return "ResultTooLarge";
    case ErrorCode::AmbiguousMap: return "AmbiguousMap";
    case ErrorCode::KeyCollisionAfterRewrite: return "KeyCollisionAfterRewrite";
    case ErrorCode::MissingHierarchy: return "MissingHierarchy";
    case ErrorCode::BadHierarchy: return "BadHierarchy";
    case ErrorCode::BadRule: return "BadRule";
    case ErrorCode::AmbiguousPeriodChain: return "AmbiguousPeriodChain";
    case ErrorCode::MissingScenarioMember: return "MissingScenarioMember";
    case ErrorCode::UnknownConceptReference: return "UnknownConceptReference";
    case ErrorCode::NonNumericInput: return "NonNumericInput";
    case ErrorCode::DuplicateCellInGroup: return "DuplicateCellInGroup";
    case ErrorCode::DuplicatePrimaryKey: return "DuplicatePrimaryKey";
    case ErrorCode::BadTable: return "BadTable";
    case ErrorCode::UnknownDimension: return "UnknownDimension";
    case ErrorCode::BadSpreadsheetDef: return "BadSpreadsheetDef";
    case ErrorCode::AmbiguousSlot: return "AmbiguousSlot";
    case ErrorCode::IncompleteCoordinates: return "IncompleteCoordinates";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::BadComponent: return "BadComponent";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

}  // namespace cellstore
