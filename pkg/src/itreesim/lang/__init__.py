"""Process-definition language: parser, static checks, elaboration."""

from .ast import Program, Span
from .elab import ElabError, EvalError, ProcTable, SimTarget, load_file, load_program
from .parser import ParseError, parse, parse_event, parse_proc_text, parse_value
