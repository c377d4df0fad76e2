//! Template explanations of predictions and a retrieval-augmented
//! generation path with pluggable embedders and language-model backends.

mod backend;
mod chunk;
mod template;
mod vector;

pub use backend::{
    generate, generate_all, HttpBackend, LlmBackend, PromptBundle, RemoteEmbedder, RetryPolicy,
    StubBackend, DEFAULT_MAX_IN_FLIGHT, DEFAULT_TOKEN_ENV, SYSTEM_PROMPT,
};
pub use chunk::{chunk_corpus, chunk_id, Chunk, SourceRef, DEFAULT_CHUNK_TOKENS};
pub use template::{build_query, corpus_from_frames, describe, phrase, render_template};
pub use vector::{retrieve, Embedder, HashingEmbedder, Retrieved, VectorStore, UNIT_TOLERANCE};
