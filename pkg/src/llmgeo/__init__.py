"""llmgeo: turns a natural-language spatial task into a validated solution graph,
LLM-generated operation code, an assembled program, and a sandboxed execution."""

__version__ = "0.1.0"
