/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/prelude.hpp"

#include "iml/syntax.hpp"

namespace iml {

std::string_view prelude_source() {
  return R"IML(
type 'a list = Nil | Cons of 'a * 'a list

let rec List.length l =
  match l with
  | [] -> 0
  | _ :: tl -> 1 + List.length tl

let rec List.append l1 l2 =
  match l1 with
  | [] -> l2
  | x :: tl -> x :: List.append tl l2

let rec List.rev l =
  match l with
  | [] -> []
  | x :: tl -> List.append (List.rev tl) [x]

let rec List.map f l =
  match l with
  | [] -> []
  | x :: tl -> f x :: List.map f tl

let rec List.fold_left f acc l =
  match l with
  | [] -> acc
  | x :: tl -> List.fold_left f (f acc x) tl
)IML";
}

const SourceModule& prelude_module() {
  static const SourceModule m = [] {
    ParseOptions opts;
    opts.allow_qualified_definitions = true;
    return parse_module(prelude_source(), opts);
  }();
  return m;
}

}  // namespace iml
