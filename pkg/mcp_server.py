# mcp_server.py
from cmapforge.mcp_server import main

if __name__ == "__main__":
    main()
