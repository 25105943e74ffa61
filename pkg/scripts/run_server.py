"""Start the evaluation server.

Configuration comes from SIMPGRID_* environment variables (see README);
flags override the basics for quick local runs. A chat endpoint is required
to launch generation; the embedding endpoint is optional and the alignment
cascade degrades to lexical similarity without one.

    python3 scripts/run_server.py --port 8000 --data-dir ./data
"""

import argparse
import dataclasses

import uvicorn

from simpgrid.api import create_app
from simpgrid.config import config_from_env


def main() -> None:
    parser = argparse.ArgumentParser(description="simplification evaluation server")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--data-dir", default=None, help="overrides SIMPGRID_DATA_DIR")
    parser.add_argument("--static-dir", default=None, help="serve a built web ui from this path")
    args = parser.parse_args()

    config = config_from_env()
    if args.data_dir is not None:
        config = dataclasses.replace(config, data_dir=args.data_dir)
    if args.static_dir is not None:
        config = dataclasses.replace(config, static_dir=args.static_dir)

    if not config.chat.base_url:
        print("warning: SIMPGRID_CHAT_BASE_URL is empty; /api/simplify will answer 502")
    if not config.embedding.endpoint_url:
        print("note: no embedding endpoint; alignment will use the lexical tier")

    uvicorn.run(create_app(config), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
