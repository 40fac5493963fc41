"""Run the retrieval service.

    python scripts/serve.py --store ./store --port 8765
"""

import argparse

import uvicorn

from concept_retrieval.service import create_app


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--store", default="./store")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8765)
    args = parser.parse_args()
    uvicorn.run(create_app(args.store), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
